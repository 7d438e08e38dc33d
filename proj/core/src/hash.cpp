#include "dwpt/hash.hpp"

#include "dwpt/meter.hpp"
#include "dwpt/sha256.hpp"

#include <stdexcept>

namespace dwpt {

namespace {
Digest32 domain_hash_raw(HashDomain domain, ByteView data) {
    const std::uint8_t prefix = static_cast<std::uint8_t>(domain);
    Sha256 h;
    h.update(ByteView{&prefix, 1});
    h.update(data);
    return h.finish();
}
}  // namespace

Digest32 hash(HashDomain domain, ByteView data) {
    MeterScope::tick_active(Primitive::Hash);
    return domain_hash_raw(domain, data);
}

Digest32 hash_iter(HashDomain domain, ByteView seed, std::uint64_t k) {
    if (k == 0) {
        if (seed.size() != Digest32::size())
            throw std::invalid_argument("hash_iter: k = 0 requires a 32-byte seed");
        Digest32 d;
        std::copy(seed.begin(), seed.end(), d.bytes.begin());
        return d;
    }
    MeterScope::tick_active(Primitive::Hash);
    Digest32 v = domain_hash_raw(domain, seed);
    for (std::uint64_t i = 1; i < k; ++i) v = domain_hash_raw(domain, v.view());
    return v;
}

Digest32 xor32(const Digest32& a, const Digest32& b) {
    MeterScope::tick_active(Primitive::Xor);
    Digest32 out;
    for (std::size_t i = 0; i < Digest32::size(); ++i) out.bytes[i] = a.bytes[i] ^ b.bytes[i];
    return out;
}

HashChain::HashChain(HashDomain domain, ByteView seed, std::uint64_t length) {
    const bool digest_seed = seed.size() == Digest32::size();
    if (length == 0 && !digest_seed)
        throw std::invalid_argument("hash chain over a non-digest seed needs length >= 1");
    values_.reserve(length + 1);
    if (digest_seed) {
        Digest32 v0;
        std::copy(seed.begin(), seed.end(), v0.bytes.begin());
        values_.push_back(v0);
    }
    if (length > 0) {
        Digest32 v = hash(domain, seed);
        values_.push_back(v);
        for (std::uint64_t i = 1; i < length; ++i) {
            v = hash(domain, v);
            values_.push_back(v);
        }
    }
    cursor_ = values_.size() - 1;
}

const Digest32& HashChain::reveal() {
    if (cursor_ == 0) throw std::logic_error("hash chain exhausted");
    --cursor_;
    return values_[cursor_];
}

}  // namespace dwpt
