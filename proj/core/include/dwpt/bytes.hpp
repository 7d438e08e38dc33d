#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dwpt {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// 32-byte opaque value: the unit of hashes, pseudonym handles, nonces and
/// XOR masks. All operations on it are length-preserving.
struct Digest32 {
    std::array<std::uint8_t, 32> bytes{};

    static constexpr std::size_t size() { return 32; }

    auto operator<=>(const Digest32&) const = default;

    ByteView view() const { return ByteView{bytes.data(), bytes.size()}; }
    bool is_zero() const {
        for (auto b : bytes)
            if (b != 0) return false;
        return true;
    }
};

std::string to_hex(ByteView data);
inline std::string to_hex(const Digest32& d) { return to_hex(d.view()); }

/// Parses a hex string; throws std::invalid_argument on odd length or
/// non-hex characters.
Bytes from_hex(std::string_view hex);
Digest32 digest_from_hex(std::string_view hex);

/// Concatenates byte views into one buffer.
Bytes cat(std::initializer_list<ByteView> parts);
inline Bytes cat(ByteView a, ByteView b) { return cat({a, b}); }
inline Bytes cat(ByteView a, ByteView b, ByteView c) { return cat({a, b, c}); }

Bytes be64(std::uint64_t v);

/// std::less-compatible ordering on raw byte strings, used for
/// deterministic containers.
struct BytesLess {
    bool operator()(const Bytes& a, const Bytes& b) const { return a < b; }
};

}  // namespace dwpt
