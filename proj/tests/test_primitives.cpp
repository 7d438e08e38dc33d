#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dwpt/bigint.hpp"
#include "dwpt/group.hpp"
#include "dwpt/hash.hpp"
#include "dwpt/meter.hpp"
#include "dwpt/rng.hpp"
#include "dwpt/sha256.hpp"
#include "dwpt/signing.hpp"

#include <cstdint>
#include <vector>

using namespace dwpt;

namespace {

// Independent SHA-256 oracle, written against FIPS 180-4 with a different
// structure from the library's streaming engine: whole-message padding up
// front, schedule computed in place.
std::vector<std::uint8_t> oracle_sha256(const std::vector<std::uint8_t>& message) {
    static const std::uint32_t k[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
        0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
        0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
        0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
        0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
        0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
        0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
        0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
        0xc67178f2};
    auto rotr = [](std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); };

    std::vector<std::uint8_t> m = message;
    const std::uint64_t bits = std::uint64_t(m.size()) * 8;
    m.push_back(0x80);
    while (m.size() % 64 != 56) m.push_back(0);
    for (int i = 7; i >= 0; --i) m.push_back(std::uint8_t(bits >> (8 * i)));

    std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                          0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    for (std::size_t off = 0; off < m.size(); off += 64) {
        std::uint32_t w[64];
        for (int t = 0; t < 16; ++t)
            w[t] = (std::uint32_t(m[off + 4 * t]) << 24) | (std::uint32_t(m[off + 4 * t + 1]) << 16) |
                   (std::uint32_t(m[off + 4 * t + 2]) << 8) | std::uint32_t(m[off + 4 * t + 3]);
        for (int t = 16; t < 64; ++t) {
            const std::uint32_t s0 = rotr(w[t - 15], 7) ^ rotr(w[t - 15], 18) ^ (w[t - 15] >> 3);
            const std::uint32_t s1 = rotr(w[t - 2], 17) ^ rotr(w[t - 2], 19) ^ (w[t - 2] >> 10);
            w[t] = w[t - 16] + s0 + w[t - 7] + s1;
        }
        std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6],
                      hh = h[7];
        for (int t = 0; t < 64; ++t) {
            const std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t t1 = hh + s1 + ch + k[t] + w[t];
            const std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t t2 = s0 + maj;
            hh = g; g = f; f = e; e = d + t1; d = c; c = b; b = a; a = t1 + t2;
        }
        h[0] += a; h[1] += b; h[2] += c; h[3] += d;
        h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
    }
    std::vector<std::uint8_t> out(32);
    for (int i = 0; i < 8; ++i) {
        out[4 * i] = std::uint8_t(h[i] >> 24);
        out[4 * i + 1] = std::uint8_t(h[i] >> 16);
        out[4 * i + 2] = std::uint8_t(h[i] >> 8);
        out[4 * i + 3] = std::uint8_t(h[i]);
    }
    return out;
}

Digest32 rand_digest(DeterministicRng& rng) { return rng.next_digest(); }

// Miller-Rabin oracle over BigUint, for checking the deployment group's
// modulus and subgroup order.
bool probably_prime(const BigUint& n, DeterministicRng& rng, int rounds = 40) {
    const BigUint one = BigUint::from_u64(1);
    const BigUint two = BigUint::from_u64(2);
    if (n.compare(two) < 0) return false;
    if (BigUint::mod(n, two).is_zero()) return n == two;

    const BigUint n_minus_1 = BigUint::sub(n, one);
    BigUint d = n_minus_1;
    std::size_t r = 0;
    while (BigUint::mod(d, two).is_zero()) {
        Bytes bytes = d.to_be_bytes(128);  // halve via byte-level shift
        std::uint16_t carry = 0;
        for (auto& b : bytes) {
            const std::uint16_t cur = std::uint16_t(carry << 8) | b;
            b = std::uint8_t(cur >> 1);
            carry = cur & 1;
        }
        d = BigUint::from_be_bytes(ByteView{bytes});
        ++r;
    }

    for (int i = 0; i < rounds; ++i) {
        // witness in [2, n-2]
        Digest32 w1 = rng.next_digest();
        Digest32 w2 = rng.next_digest();
        const BigUint a = BigUint::add(
            BigUint::mod(BigUint::mul(BigUint::from_be_bytes(w1.view()),
                                      BigUint::from_be_bytes(w2.view())),
                         BigUint::sub(n, BigUint::from_u64(3))),
            two);
        BigUint x = BigUint::modexp(a, d, n);
        if (x == one || x == n_minus_1) continue;
        bool witness = true;
        for (std::size_t j = 0; j + 1 < r; ++j) {
            x = BigUint::mulmod(x, x, n);
            if (x == n_minus_1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("sha256 matches the published vectors") {
    CHECK(to_hex(Sha256::digest({})) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    const std::vector<std::uint8_t> abc = {'a', 'b', 'c'};
    CHECK(to_hex(Sha256::digest(ByteView{abc})) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const std::string longer = "abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq";
    const std::vector<std::uint8_t> lv(longer.begin(), longer.end());
    CHECK(to_hex(Sha256::digest(ByteView{lv})) ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("sha256 agrees with an independently written implementation") {
    DeterministicRng rng(99);
    for (int len : {0, 1, 31, 32, 33, 55, 56, 57, 63, 64, 65, 100, 257, 1000}) {
        std::vector<std::uint8_t> msg(static_cast<std::size_t>(len));
        for (auto& b : msg) b = std::uint8_t(rng.next_u64());
        CHECK(Sha256::digest(ByteView{msg}).bytes ==
              [&] {
                  const auto v = oracle_sha256(msg);
                  std::array<std::uint8_t, 32> a{};
                  std::copy(v.begin(), v.end(), a.begin());
                  return a;
              }());
    }
}

TEST_CASE("domain-separated hash") {
    DeterministicRng rng(1);
    const Digest32 x = rand_digest(rng);

    SUBCASE("deterministic") { CHECK(hash(HashDomain::H, x) == hash(HashDomain::H, x)); }
    SUBCASE("domains behave as independent functions") {
        CHECK(hash(HashDomain::H, x) != hash(HashDomain::H2, x));
    }
    SUBCASE("empty input equals the prefixed reference digest") {
        // hash(H, "") is the underlying digest of the one-byte domain
        // prefix, checked against the independent implementation.
        const std::vector<std::uint8_t> prefix = {0x01};
        const auto expect = oracle_sha256(prefix);
        CHECK(to_hex(hash(HashDomain::H, ByteView{})) == to_hex(ByteView{expect}));
    }
}

TEST_CASE("hash_iter") {
    DeterministicRng rng(2);
    const Digest32 d = rand_digest(rng);

    SUBCASE("base case equals a single hash") {
        CHECK(hash_iter(HashDomain::H, d.view(), 1) == hash(HashDomain::H, d));
    }
    SUBCASE("recurrence h(h^k) = h^{k+1}") {
        for (std::uint64_t k = 1; k <= 6; ++k) {
            CHECK(hash(HashDomain::H, hash_iter(HashDomain::H, d.view(), k)) ==
                  hash_iter(HashDomain::H, d.view(), k + 1));
        }
    }
    SUBCASE("five iterations equal the unrolled loop") {
        Digest32 manual = d;
        for (int i = 0; i < 5; ++i) manual = hash(HashDomain::H, manual);
        CHECK(hash_iter(HashDomain::H, d.view(), 5) == manual);
    }
    SUBCASE("k = 0 returns a digest seed unchanged") {
        CHECK(hash_iter(HashDomain::H, d.view(), 0) == d);
    }
    SUBCASE("k = 0 rejects non-digest seeds") {
        const Bytes wide = cat(d.view(), d.view());
        CHECK_THROWS_AS(hash_iter(HashDomain::H, ByteView{wide}, 0), std::invalid_argument);
    }
}

TEST_CASE("xor32 forms an abelian group of exponent two") {
    DeterministicRng rng(3);
    const Digest32 zero{};
    for (int i = 0; i < 200; ++i) {
        const Digest32 a = rand_digest(rng);
        const Digest32 b = rand_digest(rng);
        const Digest32 c = rand_digest(rng);
        CHECK(xor32(a, zero) == a);
        CHECK(xor32(a, a) == zero);
        CHECK(xor32(xor32(a, b), b) == a);
        CHECK(xor32(a, b) == xor32(b, a));
        CHECK(xor32(xor32(a, b), c) == xor32(a, xor32(b, c)));
    }
}

TEST_CASE("biguint arithmetic against native oracles") {
    DeterministicRng rng(4);
    for (int i = 0; i < 500; ++i) {
        const std::uint64_t a = rng.next_u64() >> 1;
        const std::uint64_t b = rng.next_u64() >> 1;
        const std::uint64_t m = (rng.next_u64() >> 32) | 1;
        const BigUint A = BigUint::from_u64(a);
        const BigUint B = BigUint::from_u64(b);
        CHECK(BigUint::add(A, B) == BigUint::from_u64(a + b));
        if (a >= b) CHECK(BigUint::sub(A, B) == BigUint::from_u64(a - b));
        const unsigned __int128 prod = static_cast<unsigned __int128>(a) * b;
        CHECK(BigUint::mod(BigUint::mul(A, B), BigUint::from_u64(m)) ==
              BigUint::from_u64(static_cast<std::uint64_t>(prod % m)));
        const unsigned __int128 a_sq = static_cast<unsigned __int128>(a) * a;
        const std::uint64_t cube = static_cast<std::uint64_t>(
            (a_sq % m) * (static_cast<unsigned __int128>(a) % m) % m);
        CHECK(BigUint::modexp(A, BigUint::from_u64(3), BigUint::from_u64(m)) ==
              BigUint::from_u64(cube));
    }

    SUBCASE("byte round trip") {
        DeterministicRng r2(5);
        for (int i = 0; i < 50; ++i) {
            const Digest32 d = r2.next_digest();
            const BigUint v = BigUint::from_be_bytes(d.view());
            const Bytes back = v.to_be_bytes(32);
            CHECK(to_hex(ByteView{back}) == to_hex(d));
        }
    }
}

TEST_CASE("group exponentiation") {
    const GroupParams& toy = GroupParams::toy();

    SUBCASE("exponent 0 gives the identity") {
        CHECK(group_exp(toy, BigUint::from_u64(0)).value == BigUint::from_u64(1));
    }
    SUBCASE("exponent 1 gives the generator") {
        CHECK(group_exp(toy, BigUint::from_u64(1)).value == toy.g);
    }
    SUBCASE("toy exponent matches the iterated-multiplication oracle") {
        std::uint64_t acc = 1;
        for (int i = 0; i < 6; ++i) acc = acc * 5 % 23;
        CHECK(acc == 8);
        CHECK(group_exp(toy, BigUint::from_u64(6)).value == BigUint::from_u64(acc));
    }
    SUBCASE("homomorphism g^(a+b) = g^a g^b, brute force on the toy group") {
        for (std::uint64_t a = 0; a < 22; ++a) {
            for (std::uint64_t b = 0; b < 22; ++b) {
                const BigUint left = group_exp(toy, BigUint::from_u64(a + b)).value;
                const BigUint right =
                    BigUint::mulmod(group_exp(toy, BigUint::from_u64(a)).value,
                                    group_exp(toy, BigUint::from_u64(b)).value, toy.p);
                CHECK(left == right);
            }
        }
    }
    SUBCASE("exponents reduce modulo the group order") {
        CHECK(group_exp(toy, BigUint::from_u64(22 + 6)).value ==
              group_exp(toy, BigUint::from_u64(6)).value);
    }

    SUBCASE("deployment group fixtures") {
        const GroupParams& grp = GroupParams::full512();
        CHECK(group_exp(grp, BigUint::from_u64(0)).value == BigUint::from_u64(1));
        CHECK(group_exp(grp, BigUint::from_u64(1)).value == BigUint::from_u64(4));
        CHECK(group_exp(grp, BigUint::from_u64(6)).value == BigUint::from_u64(4096));
        CHECK(group_exp(grp, BigUint::from_u64(0xdeadbeef)).value ==
              BigUint::from_hex(
                  "7e22ee0cc00484aba8bafd4473ae3188c0cc5aed418f4097842907aa05e216ea"
                  "3433d5d7d5582dda331d57adc93a885f251320995773dd0ea72f2e7dc4166678"));
        const BigUint order_minus_1 = BigUint::sub(grp.order, BigUint::from_u64(1));
        CHECK(group_exp(grp, order_minus_1).value ==
              BigUint::from_hex(
                  "2dc37bf774075dc9b41014303176ee998d1f3591cbd92da661617a23d6577c6b"
                  "fd7b2db7e4ce4fe2410cc44f04190ef6e5028fccf837231af616047430d20e43"));
        // g^order = 1: the generator spans the prime-order subgroup.
        CHECK(group_exp(grp, grp.order).value == BigUint::from_u64(1));
    }

    SUBCASE("deployment modulus and subgroup order are prime") {
        DeterministicRng rng(6);
        const GroupParams& grp = GroupParams::full512();
        CHECK(probably_prime(grp.p, rng));
        CHECK(probably_prime(grp.order, rng));
        // Safe-prime structure: p = 2q + 1.
        CHECK(BigUint::add(BigUint::mul(grp.order, BigUint::from_u64(2)), BigUint::from_u64(1)) ==
              grp.p);
    }

    SUBCASE("wire form is exactly 64 bytes") {
        DeterministicRng rng(7);
        const GroupParams& grp = GroupParams::full512();
        const GroupElement e = group_exp(grp, digest_to_int(rng.next_digest()));
        CHECK(e.to_wire().size() == 64);
        const auto decoded = decode_element(grp, ByteView{e.to_wire()});
        REQUIRE(decoded.has_value());
        CHECK(*decoded == e);
        // Values >= p are rejected.
        Bytes oversized(64, 0xff);
        CHECK_FALSE(decode_element(grp, ByteView{oversized}).has_value());
    }
}

TEST_CASE("masked exponent is consistent for both derivation directions") {
    // Both sides compute the exponent from (mask, r); equality of the
    // resulting group elements is what the protocol checks.
    DeterministicRng rng(8);
    for (const GroupParams* grp : {&GroupParams::toy(), &GroupParams::full512()}) {
        for (int i = 0; i < 10; ++i) {
            const Digest32 mask = rng.next_digest();
            const Digest32 r = rng.next_digest();
            const BigUint e1 = masked_exponent(*grp, mask, r);
            const BigUint e2 = masked_exponent(*grp, mask, r);
            CHECK(e1 == e2);
            CHECK(e1.compare(grp->order) < 0);
            CHECK(group_exp(*grp, e1) == group_exp(*grp, e2));
        }
    }
}

TEST_CASE("signature placeholder") {
    DeterministicRng rng(9);
    SigningKeypair kp = signing_keygen(rng);
    SigningKeypair kp2 = signing_keygen(rng);

    SUBCASE("completeness and soundness over random messages") {
        DeterministicRng mrng(10);
        for (int i = 0; i < 1000; ++i) {
            const Digest32 d1 = mrng.next_digest();
            const Digest32 d2 = mrng.next_digest();
            Bytes msg = cat(d1.view(), d2.view());
            msg.resize(1 + (i % 64));
            const Bytes sig = sign_message(kp.secret, ByteView{msg});
            CHECK(verify_message(kp.public_key, ByteView{msg}, ByteView{sig}));

            Bytes tampered = msg;
            if (tampered.empty()) tampered.push_back(0);
            tampered[i % tampered.size()] ^= 0x40;
            CHECK_FALSE(verify_message(kp.public_key, ByteView{tampered}, ByteView{sig}));
        }
    }
    SUBCASE("wrong key fails") {
        DeterministicRng mrng(11);
        for (int i = 0; i < 50; ++i) {
            const Digest32 d = mrng.next_digest();
            const Bytes sig = sign_message(kp.secret, d.view());
            CHECK_FALSE(verify_message(kp2.public_key, d.view(), ByteView{sig}));
        }
    }
    SUBCASE("malformed signatures verify false without throwing") {
        const Digest32 d{};
        CHECK_FALSE(verify_message(kp.public_key, d.view(), ByteView{}));
        Bytes junk(96, 0xab);
        CHECK_FALSE(verify_message(kp.public_key, d.view(), ByteView{junk}));
    }
}

TEST_CASE("deterministic rng forks are stable and independent") {
    DeterministicRng a(42);
    DeterministicRng b(42);
    CHECK(a.next_digest() == b.next_digest());

    DeterministicRng c(42);
    DeterministicRng fork1 = c.fork("obu");
    DeterministicRng fork2 = c.fork("cspa");
    CHECK(fork1.next_digest() != fork2.next_digest());

    // Forking does not advance the parent.
    DeterministicRng d(42);
    (void)d.fork("x");
    DeterministicRng e(42);
    CHECK(d.next_digest() == e.next_digest());
}

TEST_CASE("primitives tick the active meter only") {
    DeterministicRng rng(12);
    const Digest32 d = rng.next_digest();

    Meter meter;
    {
        MeterScope scope(meter, Role::Obu, Phase::Auth);
        (void)hash(HashDomain::H, d);
        (void)hash_iter(HashDomain::H, d.view(), 7);
        (void)xor32(d, d);
        (void)group_exp(GroupParams::toy(), BigUint::from_u64(3));
    }
    (void)hash(HashDomain::H, d);  // outside any scope: not counted

    const PrimitiveCounts& c = meter.at(Role::Obu, Phase::Auth);
    CHECK(c[Primitive::Hash] == 2);  // one hash + one chain evaluation
    CHECK(c[Primitive::Xor] == 1);
    CHECK(c[Primitive::Exp] == 1);
    CHECK(meter.role_total(Role::Cspa).empty());
}
