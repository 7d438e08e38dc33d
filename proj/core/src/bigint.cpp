#include "dwpt/bigint.hpp"

#include <stdexcept>

namespace dwpt {

namespace {
using u64 = std::uint64_t;
using u128 = unsigned __int128;

std::size_t limb_count(const BigUint& v) {
    const auto& l = v.limbs();
    for (std::size_t i = BigUint::kLimbs; i > 0; --i)
        if (l[i - 1] != 0) return i;
    return 0;
}

// -m^{-1} mod 2^64 for odd m, by Newton iteration.
u64 mont_n0inv(u64 m0) {
    u64 inv = m0;  // 3 bits correct
    for (int i = 0; i < 6; ++i) inv *= 2 - m0 * inv;
    return ~inv + 1;
}

/// Montgomery context over an odd modulus of n limbs.
struct MontCtx {
    std::array<u64, BigUint::kLimbs> mod{};
    std::size_t n = 0;
    u64 n0inv = 0;
    std::array<u64, BigUint::kLimbs> r2{};  // R^2 mod m, R = 2^(64n)

    explicit MontCtx(const BigUint& m) {
        n = limb_count(m);
        if (n == 0 || (m.limbs()[0] & 1) == 0)
            throw std::invalid_argument("Montgomery modulus must be odd and nonzero");
        for (std::size_t i = 0; i < n; ++i) mod[i] = m.limbs()[i];
        n0inv = mont_n0inv(mod[0]);

        // R^2 mod m by 128n modular doublings of 1.
        std::array<u64, BigUint::kLimbs> t{};
        t[0] = 1;
        reduce_once(t);
        for (std::size_t i = 0; i < 128 * n; ++i) double_mod(t);
        r2 = t;
    }

    bool geq_mod(const std::array<u64, BigUint::kLimbs>& a) const {
        for (std::size_t i = n; i > 0; --i) {
            if (a[i - 1] != mod[i - 1]) return a[i - 1] > mod[i - 1];
        }
        return true;
    }

    void sub_mod_inplace(std::array<u64, BigUint::kLimbs>& a) const {
        u64 borrow = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const u128 d = static_cast<u128>(a[i]) - mod[i] - borrow;
            a[i] = static_cast<u64>(d);
            borrow = (d >> 64) ? 1 : 0;
        }
    }

    void reduce_once(std::array<u64, BigUint::kLimbs>& a) const {
        if (geq_mod(a)) sub_mod_inplace(a);
    }

    void double_mod(std::array<u64, BigUint::kLimbs>& a) const {
        u64 carry = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const u64 next = a[i] >> 63;
            a[i] = (a[i] << 1) | carry;
            carry = next;
        }
        if (carry || geq_mod(a)) sub_mod_inplace(a);
    }

    // CIOS Montgomery multiplication: out = a * b * R^{-1} mod m.
    std::array<u64, BigUint::kLimbs> mul(const std::array<u64, BigUint::kLimbs>& a,
                                         const std::array<u64, BigUint::kLimbs>& b) const {
        std::array<u64, BigUint::kLimbs + 2> t{};
        for (std::size_t i = 0; i < n; ++i) {
            u128 carry = 0;
            for (std::size_t j = 0; j < n; ++j) {
                const u128 acc = static_cast<u128>(t[j]) + static_cast<u128>(a[j]) * b[i] + carry;
                t[j] = static_cast<u64>(acc);
                carry = acc >> 64;
            }
            u128 acc = static_cast<u128>(t[n]) + carry;
            t[n] = static_cast<u64>(acc);
            t[n + 1] = static_cast<u64>(acc >> 64);

            const u64 m_factor = t[0] * n0inv;
            carry = (static_cast<u128>(t[0]) + static_cast<u128>(m_factor) * mod[0]) >> 64;
            for (std::size_t j = 1; j < n; ++j) {
                const u128 acc2 = static_cast<u128>(t[j]) + static_cast<u128>(m_factor) * mod[j] + carry;
                t[j - 1] = static_cast<u64>(acc2);
                carry = acc2 >> 64;
            }
            acc = static_cast<u128>(t[n]) + carry;
            t[n - 1] = static_cast<u64>(acc);
            t[n] = t[n + 1] + static_cast<u64>(acc >> 64);
            t[n + 1] = 0;
        }
        std::array<u64, BigUint::kLimbs> out{};
        for (std::size_t i = 0; i < n; ++i) out[i] = t[i];
        if (t[n] != 0 || geq_mod(out)) sub_mod_inplace(out);
        return out;
    }
};
}  // namespace

BigUint BigUint::from_u64(u64 v) {
    BigUint out;
    out.limbs_[0] = v;
    return out;
}

BigUint BigUint::from_be_bytes(ByteView bytes) {
    if (bytes.size() > kLimbs * 8) throw std::invalid_argument("value exceeds BigUint capacity");
    BigUint out;
    std::size_t limb = 0;
    std::size_t shift = 0;
    for (std::size_t i = bytes.size(); i > 0; --i) {
        out.limbs_[limb] |= static_cast<u64>(bytes[i - 1]) << shift;
        shift += 8;
        if (shift == 64) {
            shift = 0;
            ++limb;
        }
    }
    return out;
}

BigUint BigUint::from_hex(std::string_view hex) { return from_be_bytes(dwpt::from_hex(hex)); }

Bytes BigUint::to_be_bytes(std::size_t width) const {
    if (bit_length() > width * 8) throw std::invalid_argument("value does not fit requested width");
    Bytes out(width, 0);
    for (std::size_t i = 0; i < width; ++i) {
        const std::size_t byte_index = i;  // from least significant
        const std::size_t limb = byte_index / 8;
        const std::size_t shift = (byte_index % 8) * 8;
        out[width - 1 - i] = static_cast<std::uint8_t>(limbs_[limb] >> shift);
    }
    return out;
}

std::string BigUint::to_hex() const {
    const std::size_t bytes = std::max<std::size_t>(1, (bit_length() + 7) / 8);
    return dwpt::to_hex(to_be_bytes(bytes));
}

bool BigUint::is_zero() const {
    for (auto l : limbs_)
        if (l != 0) return false;
    return true;
}

std::size_t BigUint::bit_length() const {
    for (std::size_t i = kLimbs; i > 0; --i) {
        if (limbs_[i - 1] != 0) {
            std::size_t bits = 0;
            u64 v = limbs_[i - 1];
            while (v != 0) {
                ++bits;
                v >>= 1;
            }
            return (i - 1) * 64 + bits;
        }
    }
    return 0;
}

bool BigUint::bit(std::size_t i) const {
    if (i >= kLimbs * 64) return false;
    return (limbs_[i / 64] >> (i % 64)) & 1;
}

int BigUint::compare(const BigUint& other) const {
    for (std::size_t i = kLimbs; i > 0; --i) {
        if (limbs_[i - 1] != other.limbs_[i - 1])
            return limbs_[i - 1] < other.limbs_[i - 1] ? -1 : 1;
    }
    return 0;
}

BigUint BigUint::add(const BigUint& a, const BigUint& b) {
    BigUint out;
    u64 carry = 0;
    for (std::size_t i = 0; i < kLimbs; ++i) {
        const u128 s = static_cast<u128>(a.limbs_[i]) + b.limbs_[i] + carry;
        out.limbs_[i] = static_cast<u64>(s);
        carry = static_cast<u64>(s >> 64);
    }
    if (carry != 0) throw std::overflow_error("BigUint addition overflow");
    return out;
}

BigUint BigUint::sub(const BigUint& a, const BigUint& b) {
    BigUint out;
    u64 borrow = 0;
    for (std::size_t i = 0; i < kLimbs; ++i) {
        const u128 d = static_cast<u128>(a.limbs_[i]) - b.limbs_[i] - borrow;
        out.limbs_[i] = static_cast<u64>(d);
        borrow = (d >> 64) ? 1 : 0;
    }
    if (borrow != 0) throw std::underflow_error("BigUint subtraction underflow");
    return out;
}

BigUint BigUint::mul(const BigUint& a, const BigUint& b) {
    const std::size_t na = limb_count(a);
    const std::size_t nb = limb_count(b);
    if (na + nb > kLimbs + 1) throw std::overflow_error("BigUint multiplication overflow");
    std::array<u64, 2 * kLimbs> t{};
    for (std::size_t i = 0; i < na; ++i) {
        u128 carry = 0;
        for (std::size_t j = 0; j < nb; ++j) {
            const u128 acc = static_cast<u128>(t[i + j]) + static_cast<u128>(a.limbs_[i]) * b.limbs_[j] + carry;
            t[i + j] = static_cast<u64>(acc);
            carry = acc >> 64;
        }
        t[i + nb] += static_cast<u64>(carry);
    }
    for (std::size_t i = kLimbs; i < 2 * kLimbs; ++i) {
        if (t[i] != 0) throw std::overflow_error("BigUint multiplication overflow");
    }
    BigUint out;
    for (std::size_t i = 0; i < kLimbs; ++i) out.limbs_[i] = t[i];
    return out;
}

BigUint BigUint::mod(const BigUint& a, const BigUint& m) {
    if (m.is_zero()) throw std::invalid_argument("modulus must be nonzero");
    if (m.bit_length() > kLimbs * 64 - 1)
        throw std::invalid_argument("modulus too wide for shift-subtract reduction");
    if (a.compare(m) < 0) return a;

    BigUint r;
    for (std::size_t i = a.bit_length(); i > 0; --i) {
        // r = r * 2 + bit; r stays < 2m and cannot overflow capacity.
        u64 carry = a.bit(i - 1) ? 1 : 0;
        for (std::size_t j = 0; j < kLimbs; ++j) {
            const u64 next = r.limbs_[j] >> 63;
            r.limbs_[j] = (r.limbs_[j] << 1) | carry;
            carry = next;
        }
        if (r.compare(m) >= 0) r = sub(r, m);
    }
    return r;
}

BigUint BigUint::submod(const BigUint& a, const BigUint& b, const BigUint& m) {
    if (a.compare(m) >= 0 || b.compare(m) >= 0)
        throw std::invalid_argument("submod operands must be reduced");
    if (a.compare(b) >= 0) return sub(a, b);
    return sub(add(a, m), b);
}

BigUint BigUint::modexp(const BigUint& base, const BigUint& exponent, const BigUint& m) {
    if (m.is_zero()) throw std::invalid_argument("modulus must be nonzero");
    if (m == from_u64(1)) return BigUint{};

    const MontCtx ctx(m);
    const BigUint b0 = mod(base, m);

    std::array<u64, kLimbs> one{};
    one[0] = 1;
    std::array<u64, kLimbs> bm = ctx.mul(b0.limbs(), ctx.r2);
    std::array<u64, kLimbs> acc = ctx.mul(one, ctx.r2);  // 1 in Montgomery form

    const std::size_t ebits = exponent.bit_length();
    for (std::size_t i = ebits; i > 0; --i) {
        acc = ctx.mul(acc, acc);
        if (exponent.bit(i - 1)) acc = ctx.mul(acc, bm);
    }
    acc = ctx.mul(acc, one);  // convert out of Montgomery form

    BigUint out;
    for (std::size_t i = 0; i < kLimbs; ++i) {
        out.limbs_[static_cast<std::size_t>(i)] = i < ctx.n ? acc[i] : 0;
    }
    return out;
}

}  // namespace dwpt
