#pragma once

#include "dwpt/bytes.hpp"

#include <cstdint>
#include <string_view>

namespace dwpt {

/// Deterministic hash-counter generator. One root generator is seeded per
/// run and forked by label per entity, so adding entities never perturbs
/// the draws of existing ones. Uses the raw hash engine and is never
/// instrumented.
class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed);

    /// Independent child stream derived from this generator's key and the
    /// label. Forking does not advance this generator.
    DeterministicRng fork(std::string_view label) const;

    Digest32 next_digest();
    std::uint64_t next_u64();
    /// Uniform in [0, bound) via rejection sampling; bound >= 1.
    std::uint64_t next_below(std::uint64_t bound);

private:
    explicit DeterministicRng(const Digest32& key) : key_(key) {}

    Digest32 key_;
    std::uint64_t counter_ = 0;
};

}  // namespace dwpt
