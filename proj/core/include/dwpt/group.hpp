#pragma once

#include "dwpt/bigint.hpp"
#include "dwpt/bytes.hpp"

#include <optional>

namespace dwpt {

/// Multiplicative group element with a canonical 64-byte big-endian wire
/// encoding.
struct GroupElement {
    BigUint value;

    static constexpr std::size_t kWireSize = 64;

    Bytes to_wire() const { return value.to_be_bytes(kWireSize); }
    bool operator==(const GroupElement&) const = default;
};

/// Deployment-constant group parameters: prime modulus p, generator g of
/// the prime-order subgroup, that subgroup's order, and the published
/// integer parameter n used in the revised scheme's exponent.
struct GroupParams {
    BigUint p;
    BigUint g;
    BigUint order;
    BigUint n_pub;

    /// p = 23, g = 5 (a full generator, order 22), n = 7. Small enough for
    /// brute-force oracles.
    static const GroupParams& toy();
    /// 512-bit safe prime p = 2q + 1 with g = 4 generating the order-q
    /// subgroup; gives the 64-byte wire elements the byte accounting
    /// assumes.
    static const GroupParams& full512();
};

/// g^e mod p with the exponent reduced modulo the group order first.
/// Counts as one exponentiation.
GroupElement group_exp(const GroupParams& params, const BigUint& exponent);

/// Parses a canonical 64-byte encoding; rejects wrong lengths and values
/// >= p.
std::optional<GroupElement> decode_element(const GroupParams& params, ByteView wire);

/// Exponent for the revised scheme's c'7 check: the 32-byte form of
/// (r - n) mod order is xor-combined with the 32-byte mask and the result
/// read as a big-endian integer mod order. The byte xor is part of
/// exponent preparation and is priced inside the exponentiation.
BigUint masked_exponent(const GroupParams& params, const Digest32& mask, const Digest32& r);

/// Big-endian integer value of a digest.
BigUint digest_to_int(const Digest32& d);

}  // namespace dwpt
