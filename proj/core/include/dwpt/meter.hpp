#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace dwpt {

/// Primitive categories priced by the cost model. Xor is tracked even
/// though its execution time is priced at zero.
enum class Primitive : std::uint8_t { Hash, Xor, Exp, Pair, Ecm, Sig, Ver };
constexpr std::size_t kPrimitiveCount = 7;

enum class Role : std::uint8_t { Obu, Cspa, Cp, Dmv, Adversary };
constexpr std::size_t kRoleCount = 5;

/// Accounting phase of a protocol step. Registration work is one-time and
/// excluded from per-session cost totals; `Chain` holds the per-pad chain
/// hashes on the prover side, `ChainVerify` the verifier side, and
/// `Finalize` post-acceptance work (initiator key material, credential
/// storage checks).
enum class Phase : std::uint8_t { Registration, PreAuth, Auth, Chain, ChainVerify, Finalize };
constexpr std::size_t kPhaseCount = 6;

std::string role_name(Role r);
std::string phase_name(Phase p);
std::string primitive_name(Primitive p);

struct PrimitiveCounts {
    std::array<std::uint64_t, kPrimitiveCount> ops{};

    std::uint64_t& operator[](Primitive p) { return ops[static_cast<std::size_t>(p)]; }
    std::uint64_t operator[](Primitive p) const { return ops[static_cast<std::size_t>(p)]; }

    PrimitiveCounts& operator+=(const PrimitiveCounts& other) {
        for (std::size_t i = 0; i < kPrimitiveCount; ++i) ops[i] += other.ops[i];
        return *this;
    }
    bool operator==(const PrimitiveCounts&) const = default;
    bool empty() const {
        for (auto v : ops)
            if (v != 0) return false;
        return true;
    }
};

/// Per-(role, phase) primitive counters for one run.
class Meter {
public:
    void tick(Role r, Phase p, Primitive op, std::uint64_t n = 1) {
        cells_[index(r, p)][op] += n;
    }
    const PrimitiveCounts& at(Role r, Phase p) const { return cells_[index(r, p)]; }
    PrimitiveCounts role_total(Role r) const {
        PrimitiveCounts out;
        for (std::size_t p = 0; p < kPhaseCount; ++p)
            out += cells_[index(r, static_cast<Phase>(p))];
        return out;
    }
    void reset() { cells_ = {}; }

private:
    static std::size_t index(Role r, Phase p) {
        return static_cast<std::size_t>(r) * kPhaseCount + static_cast<std::size_t>(p);
    }
    std::array<PrimitiveCounts, kRoleCount * kPhaseCount> cells_{};
};

/// RAII scope that routes primitive ticks to a meter under a (role, phase)
/// label. Scopes nest; the innermost active scope receives the ticks.
/// Primitives called with no active scope are not counted, which keeps the
/// primitive functions pure for library consumers that do not instrument.
class MeterScope {
public:
    MeterScope(Meter& meter, Role role, Phase phase);
    MeterScope(const MeterScope&) = delete;
    MeterScope& operator=(const MeterScope&) = delete;
    ~MeterScope();

    static void tick_active(Primitive op, std::uint64_t n = 1);

private:
    MeterScope* parent_;
    Meter& meter_;
    Role role_;
    Phase phase_;
};

}  // namespace dwpt
