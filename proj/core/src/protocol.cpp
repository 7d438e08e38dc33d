#include "dwpt/protocol.hpp"

#include <stdexcept>

namespace dwpt {

namespace {
/// Opens a meter scope when a meter is attached; no-op otherwise.
class ScopedPhase {
public:
    ScopedPhase(Meter* meter, Role role, Phase phase) {
        if (meter != nullptr) scope_.emplace(*meter, role, phase);
    }

private:
    std::optional<MeterScope> scope_;
};
}  // namespace

std::string reject_name(Reject r) {
    switch (r) {
        case Reject::AuthenticationFailed: return "authentication-failed";
        case Reject::DoubleSpendRejected: return "double-spend-rejected";
        case Reject::UnknownPseudonym: return "unknown-pseudonym";
        case Reject::CredentialsExhausted: return "credentials-exhausted";
        case Reject::RegistrationRejected: return "registration-rejected";
        case Reject::ProtocolError: return "protocol-error";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// OBU

Obu::Obu(Credentials credentials, DeterministicRng rng, Meter* meter)
    : credentials_(std::move(credentials)), rng_(std::move(rng)), meter_(meter) {}

const Digest32& Obu::current_handle() const {
    if (!current_index_) throw std::logic_error("no pseudonym in use");
    return credentials_.handles[*current_index_].handle;
}

std::optional<std::size_t> Obu::consume_pseudonym() {
    if (pseudonyms_exhausted()) return std::nullopt;
    current_index_ = next_pseudonym_++;
    return current_index_;
}

M1 Obu::make_registration() const {
    return M1{credentials_.pwd_obu, credentials_.x_obu_static};
}

Result<Accepted> Obu::accept_registration(const M2& m2) {
    if (m2.x_obu != credentials_.x_obu_static)
        return {Reject::RegistrationRejected, "identifier echo mismatch"};
    h2_val_ = m2.h2_val;
    h3_val_ = m2.h3_val;
    registered_ = true;
    return Accepted{};
}

Result<PreAuth> Obu::make_pre_auth() {
    ScopedPhase scope(meter_, Role::Obu, Phase::PreAuth);
    if (!consume_pseudonym()) return {Reject::CredentialsExhausted, "no unused pseudonym"};
    pending_x_dyn_ = x_obu_dynamic(credentials_.handles[*current_index_]);
    return PreAuth{pending_x_dyn_, credentials_.pwd_obu, rng_.next_digest()};
}

Result<Accepted> Obu::accept_pre_auth(const M2& m2) {
    ScopedPhase scope(meter_, Role::Obu, Phase::PreAuth);
    if (!current_index_) return {Reject::ProtocolError, "pre-auth before pseudonym selection"};
    if (m2.x_obu != pending_x_dyn_)
        return {Reject::RegistrationRejected, "identifier echo mismatch"};
    h2_val_ = m2.h2_val;
    h3_val_ = m2.h3_val;
    registered_ = true;
    return Accepted{};
}

Result<M3> Obu::dma_request() {
    ScopedPhase scope(meter_, Role::Obu, Phase::Auth);
    if (!registered_) return {Reject::ProtocolError, "registration material missing"};
    if (!consume_pseudonym()) return {Reject::CredentialsExhausted, "no unused pseudonym"};
    const Digest32& ps = current_handle();

    M3 m;
    m.c1 = xor32(hash(HashDomain::H, h2_val_), ps);
    m.c2 = hash(HashDomain::H, xor32(ps, credentials_.x_obu_static));
    m.c3 = hash_iter(HashDomain::H,
                     ByteView{cat({ps.view(), m.c2.view(), h3_val_.view()})}, 2);
    m.h3 = h3_val_;
    r_obu_ = rng_.next_digest();
    m.delta4 = xor32(r_obu_, ps);
    return m;
}

Result<Digest32> Obu::dma_finish(const M4& m4, const Digest32& id_cp) {
    Digest32 r_cp;
    Digest32 hh_ps;
    {
        ScopedPhase scope(meter_, Role::Obu, Phase::Auth);
        if (!current_index_) return {Reject::ProtocolError, "no authentication in flight"};
        const Digest32& ps = current_handle();

        const Digest32 id_j = hash(HashDomain::H, ByteView{cat(r_obu_.view(), id_cp.view())});
        r_cp = xor32(m4.c4, id_j);

        hh_ps = hash_iter(HashDomain::H, ps.view(), 2);
        if (xor32(r_cp, hh_ps) != m4.c5) return {Reject::AuthenticationFailed, "c5 mismatch"};

        const Digest32 c6_expect =
            hash(HashDomain::H, ByteView{cat({r_cp.view(), m4.c4.view(), m4.c5.view()})});
        if (c6_expect != m4.c6) return {Reject::AuthenticationFailed, "c6 mismatch"};

        extracted_h1_ = xor32(m4.c7, hh_ps);
    }

    // Post-acceptance: validate the extracted security parameter against
    // the stored H2 (h(H1) = H2 by construction) before keeping it, then
    // derive the session key.
    ScopedPhase finalize(meter_, Role::Obu, Phase::Finalize);
    if (hash(HashDomain::H, extracted_h1_) != h2_val_)
        return {Reject::AuthenticationFailed, "extracted H1 fails integrity check"};
    return hash(HashDomain::H,
                ByteView{cat({r_obu_.view(), r_cp.view(), current_handle().view()})});
}

Result<RevM3> Obu::rev_request(std::uint64_t chain_len) {
    ScopedPhase scope(meter_, Role::Obu, Phase::Auth);
    if (!registered_ || !current_index_)
        return {Reject::ProtocolError, "pre-authentication missing"};
    if (chain_len == 0) throw std::invalid_argument("rev_request: chain_len must be >= 1");
    const Digest32& ps = current_handle();

    RevM3 m;
    m.c1 = xor32(hash(HashDomain::H, h2_val_), ps);
    const Digest32 h_ps = hash(HashDomain::H, ps);
    m.c3p = hash(HashDomain::H, ByteView{cat(h_ps.view(), h3_val_.view())});
    r_obu_ = rng_.next_digest();
    m.c4p = xor32(r_obu_, ps);

    // Chain anchor h^chain_len(N_OBU || PS): the seed compression is part
    // of building the authentication request; the remaining links are the
    // per-pad chain budget.
    n_obu_ = rng_.next_digest();
    const Digest32 link1 = hash(HashDomain::H, ByteView{cat(n_obu_.view(), ps.view())});
    {
        ScopedPhase chain_scope(meter_, Role::Obu, Phase::Chain);
        chain_.emplace(HashDomain::H, link1.view(), chain_len - 1);
    }
    m.c5p = chain_->head();
    m.h3 = h3_val_;
    return m;
}

Result<Accepted> Obu::rev_verify(const RevM4& m4) {
    ScopedPhase scope(meter_, Role::Obu, Phase::Auth);
    if (!current_index_ || !chain_) return {Reject::ProtocolError, "no authentication in flight"};
    if (m4.c7p.value.compare(group_->p) >= 0 || m4.c7p.value.is_zero())
        return {Reject::ProtocolError, "response element not canonical"};

    const Digest32 p_prime =
        hash(HashDomain::H, ByteView{cat(r_obu_.view(), current_handle().view())});
    r_cspa_ = xor32(m4.c6p, p_prime);

    const BigUint e = masked_exponent(*group_, p_prime, r_cspa_);
    if (group_exp(*group_, e) != m4.c7p)
        return {Reject::AuthenticationFailed, "exponentiation check mismatch"};
    return Accepted{};
}

Digest32 Obu::finalize_session_key(const Digest32& id_cp) {
    ScopedPhase scope(meter_, Role::Obu, Phase::Finalize);
    return hash(HashDomain::H,
                ByteView{cat({chain_->head().view(), r_cspa_.view(), id_cp.view()})});
}

Result<ChainValue> Obu::pha_start() {
    if (credentials_.chain_length == 0)
        return {Reject::ProtocolError, "no provisioned chains"};
    if (!consume_pseudonym()) return {Reject::CredentialsExhausted, "no unused pseudonym"};
    ScopedPhase chain_scope(meter_, Role::Obu, Phase::Chain);
    chain_.emplace(HashDomain::H, current_handle().view(), credentials_.chain_length);
    return ChainValue{chain_->head()};
}

Result<ChainValue> Obu::next_chain_value() {
    if (!chain_) return {Reject::ProtocolError, "no chain session"};
    if (chain_->exhausted()) return {Reject::CredentialsExhausted, "hash chain exhausted"};
    ScopedPhase scope(meter_, Role::Obu, Phase::Chain);
    return ChainValue{chain_->reveal()};
}

// ---------------------------------------------------------------------------
// CSPA

Cspa::Cspa(DeterministicRng rng, UpdatePolicy policy, Meter* meter)
    : rng_(std::move(rng)), policy_(policy), meter_(meter) {
    secret_s_ = rng_.next_digest();
    msk_ = rng_.next_digest();
}

void Cspa::learn_vehicle(const Digest32& x_obu, const Digest32& pwd) {
    known_vehicles_[x_obu] = pwd;
    known_pwds_.insert(pwd);
}

void Cspa::learn_pwd(const Digest32& pwd) { known_pwds_.insert(pwd); }

void Cspa::adopt_pseudonym_db(CspaPseudonymDb db) {
    ScopedPhase scope(meter_, Role::Cspa, Phase::Registration);
    pseudonym_db_ = std::move(db);
    x_dyn_index_.clear();
    for (const auto& handle : pseudonym_db_.entries())
        x_dyn_index_.insert(hash(HashDomain::H2, handle));
}

M2 Cspa::derive_params(const Digest32& x_obu) {
    const Digest32 h1 = hash(HashDomain::H, ByteView{cat(secret_s_.view(), x_obu.view())});
    const Digest32 h2 = hash(HashDomain::H, h1);
    const Digest32 h3 = xor32(msk_, h1);
    security_params_[x_obu] = h1;
    h3_index_[h3] = x_obu;
    return M2{x_obu, h2, h3};
}

Result<M2> Cspa::register_obu(const M1& m1) {
    ScopedPhase scope(meter_, Role::Cspa, Phase::Registration);
    const auto it = known_vehicles_.find(m1.x_obu);
    if (it == known_vehicles_.end())
        return {Reject::RegistrationRejected, "unknown vehicle identifier"};
    if (it->second != m1.pwd) return {Reject::RegistrationRejected, "password mismatch"};
    return derive_params(m1.x_obu);
}

Result<M2> Cspa::pre_authenticate(const PreAuth& request) {
    ScopedPhase scope(meter_, Role::Cspa, Phase::PreAuth);
    if (known_pwds_.count(request.pwd) == 0)
        return {Reject::RegistrationRejected, "unknown password"};
    if (x_dyn_index_.count(request.x_obu_dyn) == 0)
        return {Reject::RegistrationRejected,
                "identifier matches no issued pseudonym"};
    return derive_params(request.x_obu_dyn);
}

Result<RevM4> Cspa::rev_respond(const RevM3& m, const Digest32& id_cp) {
    ScopedPhase scope(meter_, Role::Cspa, Phase::Auth);

    const auto h3_it = h3_index_.find(m.h3);
    if (h3_it == h3_index_.end())
        return {Reject::AuthenticationFailed, "H3 matches no pre-authentication"};
    const Digest32& x_obu = h3_it->second;
    const Digest32& h1 = security_params_.at(x_obu);

    const Digest32 h2 = hash(HashDomain::H, h1);
    const Digest32 ps = xor32(m.c1, hash(HashDomain::H, h2));
    const Digest32 r_obu = xor32(m.c4p, ps);

    const Digest32 h_ps = hash(HashDomain::H, ps);
    const Digest32 c3_expect = hash(HashDomain::H, ByteView{cat(h_ps.view(), m.h3.view())});
    if (c3_expect != m.c3p) return {Reject::AuthenticationFailed, "c'3 mismatch"};

    if (!pseudonym_db_.contains(ps)) return {Reject::UnknownPseudonym, "pseudonym not issued"};
    if (pseudonym_db_.spent(ps)) return {Reject::DoubleSpendRejected, "pseudonym already used"};

    // Binding between the handshake pseudonym and the pre-authenticated
    // dynamic identifier.
    if (hash(HashDomain::H2, ps) != x_obu)
        return {Reject::AuthenticationFailed, "pseudonym does not match registered identifier"};

    pseudonym_db_.mark_spent(ps);

    const Digest32 p_prime = hash(HashDomain::H, ByteView{cat(r_obu.view(), ps.view())});
    const Digest32 r_cspa = rng_.next_digest();

    RevM4 out;
    out.c6p = xor32(p_prime, r_cspa);
    out.c7p = group_exp(*group_, masked_exponent(*group_, p_prime, r_cspa));

    const Digest32 session_key =
        hash(HashDomain::H, ByteView{cat({m.c5p.view(), r_cspa.view(), id_cp.view()})});

    const std::size_t slot = chain_sessions_.size();
    chain_sessions_.push_back(ChainSession{m.c5p, std::uint64_t(-1), session_key});
    expected_index_[m.c5p] = slot;
    return out;
}

Digest32 Cspa::register_chain_head(const Digest32& head, std::uint64_t remaining,
                                   const Digest32& id_cp) {
    ScopedPhase scope(meter_, Role::Cspa, Phase::Auth);
    const Digest32 r_cspa = rng_.next_digest();
    const Digest32 session_key =
        hash(HashDomain::H, ByteView{cat({head.view(), r_cspa.view(), id_cp.view()})});
    const std::size_t slot = chain_sessions_.size();
    chain_sessions_.push_back(ChainSession{head, remaining, session_key});
    expected_index_[head] = slot;
    return session_key;
}

Result<Cspa::ChainAccept> Cspa::verify_chain(const ChainValue& cv) {
    ScopedPhase scope(meter_, Role::Cspa, Phase::ChainVerify);
    const Digest32 hashed = hash(HashDomain::H, cv.v);
    const auto it = expected_index_.find(hashed);
    if (it == expected_index_.end())
        return {Reject::AuthenticationFailed, "value does not hash to any expected parameter"};

    ChainSession& session = chain_sessions_[it->second];
    if (session.remaining == 0)
        return {Reject::CredentialsExhausted, "chain session exhausted"};
    if (session.remaining != std::uint64_t(-1)) --session.remaining;

    if (policy_ == UpdatePolicy::Fixed) {
        const std::size_t slot = it->second;
        expected_index_.erase(it);
        session.expected = cv.v;
        expected_index_[cv.v] = slot;
    } else {
        // Store the hash of the received value: bitwise identical to what
        // is already in memory, so the expectation never advances.
        session.expected = hashed;
    }
    return ChainAccept{session.session_key};
}

std::optional<Digest32> Cspa::expected_for_session(std::size_t session_index) const {
    if (session_index >= chain_sessions_.size()) return std::nullopt;
    return chain_sessions_[session_index].expected;
}

// ---------------------------------------------------------------------------
// CP

Cp::Cp(Digest32 id, DeterministicRng rng, Meter* meter)
    : id_(id), rng_(std::move(rng)), meter_(meter) {}

void Cp::provision_dma(const Digest32& msk, std::vector<Digest32> x_registry, bool verify_c2) {
    msk_ = msk;
    x_registry_ = std::move(x_registry);
    verify_c2_ = verify_c2;
    dma_ready_ = true;
}

Result<M4> Cp::dma_respond(const M3& m3, std::uint64_t timestamp) {
    Digest32 session_key;
    M4 out;
    {
        ScopedPhase scope(meter_, Role::Cp, Phase::Auth);
        if (!dma_ready_) return {Reject::ProtocolError, "pad lacks master secret"};

        const Digest32 h1 = xor32(m3.h3, msk_);
        const Digest32 h2 = hash(HashDomain::H, h1);
        const Digest32 ps = xor32(m3.c1, hash(HashDomain::H, h2));

        if (verify_c2_) {
            // Brute-force scan of the identifier registry; the cost this
            // check adds is the reason it is optional.
            bool found = false;
            for (const auto& x : x_registry_) {
                if (hash(HashDomain::H, xor32(ps, x)) == m3.c2) {
                    found = true;
                    break;
                }
            }
            if (!found) return {Reject::AuthenticationFailed, "c2 matches no registered identifier"};
        }

        const Digest32 c3_expect = hash_iter(
            HashDomain::H, ByteView{cat({ps.view(), m3.c2.view(), m3.h3.view()})}, 2);
        if (c3_expect != m3.c3) return {Reject::AuthenticationFailed, "c3 mismatch"};

        const Digest32 r_obu = xor32(m3.delta4, ps);
        const Digest32 id_j = hash(HashDomain::H, ByteView{cat(r_obu.view(), id_.view())});
        const Digest32 r_cp = rng_.next_digest();

        out.c4 = xor32(id_j, r_cp);
        const Digest32 hh_ps = hash_iter(HashDomain::H, ps.view(), 2);
        out.c5 = xor32(r_cp, hh_ps);
        out.c6 = hash(HashDomain::H, ByteView{cat({r_cp.view(), out.c4.view(), out.c5.view()})});
        out.c7 = xor32(h1, hh_ps);

        session_key =
            hash(HashDomain::H, ByteView{cat({r_obu.view(), r_cp.view(), ps.view()})});
    }
    store_session_key(session_key, timestamp);
    return out;
}

void Cp::store_session_key(const Digest32& key, std::uint64_t timestamp) {
    session_keys_.emplace_back(key, timestamp);
}

}  // namespace dwpt
