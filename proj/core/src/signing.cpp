#include "dwpt/signing.hpp"

#include "dwpt/bigint.hpp"
#include "dwpt/group.hpp"
#include "dwpt/meter.hpp"
#include "dwpt/sha256.hpp"

namespace dwpt {

namespace {
constexpr std::uint8_t kNonceTag = 0x6b;
constexpr std::uint8_t kChallengeTag = 0x65;
constexpr std::uint8_t kStreamTag = 0x73;
constexpr std::size_t kScalarWire = 64;
constexpr std::size_t kSigSize = kScalarWire + Digest32::size();

Digest32 tagged_hash(std::uint8_t tag, ByteView a, ByteView b) {
    Sha256 h;
    h.update(ByteView{&tag, 1});
    h.update(a);
    h.update(b);
    return h.finish();
}
}  // namespace

SigningKeypair signing_keygen(DeterministicRng& rng) {
    const GroupParams& grp = GroupParams::full512();
    Digest32 sk = rng.next_digest();
    if (BigUint::from_be_bytes(sk.view()).is_zero()) sk.bytes[31] = 1;
    const BigUint x = BigUint::from_be_bytes(sk.view());
    const BigUint y = BigUint::modexp(grp.g, x, grp.p);
    return SigningKeypair{Bytes(sk.bytes.begin(), sk.bytes.end()), y.to_be_bytes(kScalarWire)};
}

Bytes sign_message(const Bytes& secret, ByteView msg) {
    MeterScope::tick_active(Primitive::Sig);
    const GroupParams& grp = GroupParams::full512();
    const BigUint x = BigUint::from_be_bytes(secret);

    // Deterministic nonce; a 256-bit value is already below the group order.
    Digest32 kd = tagged_hash(kNonceTag, secret, msg);
    BigUint k = BigUint::from_be_bytes(kd.view());
    if (k.is_zero()) k = BigUint::from_u64(1);

    const BigUint r_point = BigUint::modexp(grp.g, k, grp.p);
    const Bytes r_wire = r_point.to_be_bytes(kScalarWire);
    const Digest32 e_digest = tagged_hash(kChallengeTag, r_wire, msg);
    const BigUint e = BigUint::from_be_bytes(e_digest.view());

    const BigUint s = BigUint::mod(BigUint::add(k, BigUint::mulmod(e, x, grp.order)), grp.order);

    Bytes sig = s.to_be_bytes(kScalarWire);
    sig.insert(sig.end(), e_digest.bytes.begin(), e_digest.bytes.end());
    return sig;
}

bool verify_message(const Bytes& public_key, ByteView msg, ByteView signature) {
    MeterScope::tick_active(Primitive::Ver);
    if (signature.size() != kSigSize || public_key.size() != kScalarWire) return false;

    const GroupParams& grp = GroupParams::full512();
    const BigUint s = BigUint::from_be_bytes(signature.subspan(0, kScalarWire));
    const BigUint e = BigUint::from_be_bytes(signature.subspan(kScalarWire));
    const BigUint y = BigUint::from_be_bytes(public_key);
    if (s.compare(grp.order) >= 0 || y.compare(grp.p) >= 0 || y.is_zero()) return false;

    // R' = g^s * y^(order - e): y has order `order`, so this is g^s * y^-e.
    const BigUint e_red = BigUint::mod(e, grp.order);
    const BigUint neg_e = BigUint::sub(grp.order, e_red);
    const BigUint gs = BigUint::modexp(grp.g, s, grp.p);
    const BigUint ye = BigUint::modexp(y, neg_e, grp.p);
    const BigUint r_point = BigUint::mulmod(gs, ye, grp.p);

    const Bytes r_wire = r_point.to_be_bytes(kScalarWire);
    const Digest32 expect = tagged_hash(kChallengeTag, r_wire, msg);
    return std::equal(expect.bytes.begin(), expect.bytes.end(), signature.begin() + kScalarWire);
}

Bytes sym_encrypt(const Digest32& key, ByteView plaintext) {
    Bytes out(plaintext.begin(), plaintext.end());
    std::size_t off = 0;
    std::uint64_t block = 0;
    while (off < out.size()) {
        Sha256 h;
        h.update(ByteView{&kStreamTag, 1});
        h.update(key.view());
        const Bytes b = be64(block++);
        h.update(b);
        const Digest32 stream = h.finish();
        for (std::size_t i = 0; i < Digest32::size() && off < out.size(); ++i, ++off)
            out[off] ^= stream.bytes[i];
    }
    return out;
}

}  // namespace dwpt
