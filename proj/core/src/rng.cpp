#include "dwpt/rng.hpp"

#include "dwpt/sha256.hpp"

#include <limits>
#include <stdexcept>

namespace dwpt {

namespace {
constexpr std::uint8_t kSeedTag = 0x52;  // 'R'
constexpr std::uint8_t kForkTag = 0x46;  // 'F'
constexpr std::uint8_t kNextTag = 0x4e;  // 'N'
}  // namespace

DeterministicRng::DeterministicRng(std::uint64_t seed) {
    Sha256 h;
    h.update(ByteView{&kSeedTag, 1});
    const Bytes s = be64(seed);
    h.update(s);
    key_ = h.finish();
}

DeterministicRng DeterministicRng::fork(std::string_view label) const {
    Sha256 h;
    h.update(ByteView{&kForkTag, 1});
    h.update(key_.view());
    h.update(ByteView{reinterpret_cast<const std::uint8_t*>(label.data()), label.size()});
    return DeterministicRng(h.finish());
}

Digest32 DeterministicRng::next_digest() {
    Sha256 h;
    h.update(ByteView{&kNextTag, 1});
    h.update(key_.view());
    const Bytes c = be64(counter_++);
    h.update(c);
    return h.finish();
}

std::uint64_t DeterministicRng::next_u64() {
    const Digest32 d = next_digest();
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | d.bytes[i];
    return v;
}

std::uint64_t DeterministicRng::next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("next_below: bound must be >= 1");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                (std::numeric_limits<std::uint64_t>::max() % bound);
    for (;;) {
        const std::uint64_t v = next_u64();
        if (v < limit) return v % bound;
    }
}

}  // namespace dwpt
