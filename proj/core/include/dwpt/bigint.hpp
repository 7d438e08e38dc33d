#pragma once

#include "dwpt/bytes.hpp"

#include <array>
#include <cstdint>

namespace dwpt {

/// Fixed-capacity unsigned big integer, 16 x 64-bit limbs (1024 bits).
/// Sized so that the product of two 512-bit group values fits without
/// allocation. Little-endian limb order.
class BigUint {
public:
    static constexpr std::size_t kLimbs = 16;

    BigUint() = default;
    static BigUint from_u64(std::uint64_t v);
    static BigUint from_be_bytes(ByteView bytes);
    static BigUint from_hex(std::string_view hex);

    /// Big-endian encoding, zero-padded to `width` bytes. Throws
    /// std::invalid_argument if the value does not fit.
    Bytes to_be_bytes(std::size_t width) const;
    std::string to_hex() const;

    bool is_zero() const;
    std::size_t bit_length() const;
    bool bit(std::size_t i) const;

    int compare(const BigUint& other) const;
    bool operator==(const BigUint&) const = default;
    bool operator<(const BigUint& o) const { return compare(o) < 0; }
    bool operator>=(const BigUint& o) const { return compare(o) >= 0; }

    /// Throws std::overflow_error if the true result exceeds capacity.
    static BigUint add(const BigUint& a, const BigUint& b);
    /// Requires a >= b; throws std::underflow_error otherwise.
    static BigUint sub(const BigUint& a, const BigUint& b);
    /// Schoolbook product; throws std::overflow_error if it exceeds
    /// capacity.
    static BigUint mul(const BigUint& a, const BigUint& b);
    /// Binary long-division remainder; m >= 1.
    static BigUint mod(const BigUint& a, const BigUint& m);
    static BigUint mulmod(const BigUint& a, const BigUint& b, const BigUint& m) {
        return mod(mul(a, b), m);
    }
    /// (a - b) mod m for a, b < m.
    static BigUint submod(const BigUint& a, const BigUint& b, const BigUint& m);
    /// Montgomery square-and-multiply; m must be odd.
    static BigUint modexp(const BigUint& base, const BigUint& exponent, const BigUint& m);

    const std::array<std::uint64_t, kLimbs>& limbs() const { return limbs_; }

private:
    std::array<std::uint64_t, kLimbs> limbs_{};
};

}  // namespace dwpt
