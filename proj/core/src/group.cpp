#include "dwpt/group.hpp"

#include "dwpt/meter.hpp"

namespace dwpt {

namespace {
// 512-bit safe prime p = 2q + 1; 4 = 2^2 generates the order-q subgroup.
constexpr std::string_view kP512 =
    "b70defddd01d7726d04050c0c5dbba66347cd6472f64b6998585e88f595df1af"
    "f5ecb6df93393f890433113c10643bdb940a3f33e0dc8c6bd85811d0c348390b";
constexpr std::string_view kQ512 =
    "5b86f7eee80ebb936820286062eddd331a3e6b2397b25b4cc2c2f447acaef8d7"
    "faf65b6fc99c9fc48219889e08321dedca051f99f06e4635ec2c08e861a41c85";
// Published exponent parameter: leading 256 bits of sqrt(2). A full-width
// n makes the subtraction in the exponent mask borrow across the whole
// nonce, so a flipped request bit cannot commute through it.
constexpr std::string_view kN512 =
    "b504f333f9de6484597d89b3754abe9f1d6f60ba893ba84ced17ac8583339915";
}  // namespace

const GroupParams& GroupParams::toy() {
    static const GroupParams params{
        BigUint::from_u64(23), BigUint::from_u64(5), BigUint::from_u64(22), BigUint::from_u64(7)};
    return params;
}

const GroupParams& GroupParams::full512() {
    static const GroupParams params{
        BigUint::from_hex(kP512), BigUint::from_u64(4), BigUint::from_hex(kQ512),
        BigUint::from_hex(kN512)};
    return params;
}

GroupElement group_exp(const GroupParams& params, const BigUint& exponent) {
    MeterScope::tick_active(Primitive::Exp);
    const BigUint e = BigUint::mod(exponent, params.order);
    return GroupElement{BigUint::modexp(params.g, e, params.p)};
}

std::optional<GroupElement> decode_element(const GroupParams& params, ByteView wire) {
    if (wire.size() != GroupElement::kWireSize) return std::nullopt;
    const BigUint v = BigUint::from_be_bytes(wire);
    if (v.compare(params.p) >= 0) return std::nullopt;
    return GroupElement{v};
}

BigUint digest_to_int(const Digest32& d) { return BigUint::from_be_bytes(d.view()); }

BigUint masked_exponent(const GroupParams& params, const Digest32& mask, const Digest32& r) {
    const BigUint r_red = BigUint::mod(digest_to_int(r), params.order);
    const BigUint n_red = BigUint::mod(params.n_pub, params.order);
    const BigUint delta = BigUint::submod(r_red, n_red, params.order);

    // 32-byte form of delta. Once the subtraction wraps past the group
    // order the value needs more than 32 bytes; both sides truncate to the
    // low 256 bits identically.
    Digest32 delta32;
    const Bytes wide = delta.to_be_bytes(BigUint::kLimbs * 8);
    std::copy(wide.end() - 32, wide.end(), delta32.bytes.begin());

    Digest32 combined;
    for (std::size_t i = 0; i < Digest32::size(); ++i)
        combined.bytes[i] = mask.bytes[i] ^ delta32.bytes[i];
    return BigUint::mod(digest_to_int(combined), params.order);
}

}  // namespace dwpt
