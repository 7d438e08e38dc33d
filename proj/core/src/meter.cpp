#include "dwpt/meter.hpp"

namespace dwpt {

namespace {
thread_local MeterScope* g_active_scope = nullptr;
}

std::string role_name(Role r) {
    switch (r) {
        case Role::Obu: return "obu";
        case Role::Cspa: return "cspa";
        case Role::Cp: return "cp";
        case Role::Dmv: return "dmv";
        case Role::Adversary: return "adversary";
    }
    return "?";
}

std::string phase_name(Phase p) {
    switch (p) {
        case Phase::Registration: return "registration";
        case Phase::PreAuth: return "preauth";
        case Phase::Auth: return "auth";
        case Phase::Chain: return "chain";
        case Phase::ChainVerify: return "chain_verify";
        case Phase::Finalize: return "finalize";
    }
    return "?";
}

std::string primitive_name(Primitive p) {
    switch (p) {
        case Primitive::Hash: return "hash";
        case Primitive::Xor: return "xor";
        case Primitive::Exp: return "exp";
        case Primitive::Pair: return "pair";
        case Primitive::Ecm: return "ecm";
        case Primitive::Sig: return "sig";
        case Primitive::Ver: return "ver";
    }
    return "?";
}

MeterScope::MeterScope(Meter& meter, Role role, Phase phase)
    : parent_(g_active_scope), meter_(meter), role_(role), phase_(phase) {
    g_active_scope = this;
}

MeterScope::~MeterScope() { g_active_scope = parent_; }

void MeterScope::tick_active(Primitive op, std::uint64_t n) {
    if (g_active_scope != nullptr) {
        g_active_scope->meter_.tick(g_active_scope->role_, g_active_scope->phase_, op, n);
    }
}

}  // namespace dwpt
