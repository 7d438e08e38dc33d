#pragma once

#include "dwpt/bytes.hpp"

#include <cstdint>
#include <vector>

namespace dwpt {

/// The two independent collision-free hash functions used by the
/// protocols. Both are instantiated over one 256-bit hash with distinct
/// one-byte domain prefixes.
enum class HashDomain : std::uint8_t { H = 0x01, H2 = 0x02 };

/// Domain-separated hash of arbitrary data. Counts as one hash operation.
Digest32 hash(HashDomain domain, ByteView data);
inline Digest32 hash(HashDomain domain, const Digest32& d) { return hash(domain, d.view()); }

/// Iterated hash h^k(seed). A chain evaluation counts as one hash
/// operation regardless of k, matching the cost model's per-operation
/// granularity for composed hashes. k = 0 returns the seed unchanged and
/// requires it to already be a 32-byte digest.
///
/// Throws std::invalid_argument for k = 0 with a non-32-byte seed.
Digest32 hash_iter(HashDomain domain, ByteView seed, std::uint64_t k);

/// Bytewise exclusive-or of two 32-byte values. Counts as one xor
/// operation.
Digest32 xor32(const Digest32& a, const Digest32& b);

/// Hash chain v1 = h(seed), v2 = h(v1), ..., v_length = head. Values are
/// revealed highest-unrevealed-first so each one authenticates against
/// its successor. When the seed is itself a 32-byte digest it is kept as
/// v0 and is the last revealable value; length 0 is allowed only then and
/// leaves just the seed as head with nothing to reveal.
///
/// Building the chain ticks one hash per link.
class HashChain {
public:
    HashChain(HashDomain domain, ByteView seed, std::uint64_t length);

    const Digest32& head() const { return values_.back(); }
    /// Number of values still available below the head.
    std::uint64_t remaining() const { return cursor_; }

    bool exhausted() const { return cursor_ == 0; }
    /// Next value to reveal: the predecessor of the last revealed one.
    /// Call only while !exhausted().
    const Digest32& reveal();

    /// All values v_first..head, lowest first (v0 included when the seed
    /// is a digest).
    const std::vector<Digest32>& values() const { return values_; }

private:
    std::vector<Digest32> values_;
    std::uint64_t cursor_;  // index into values_ of the next reveal
};

}  // namespace dwpt
