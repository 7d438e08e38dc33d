#pragma once

#include "dwpt/bytes.hpp"

#include <cstddef>
#include <cstdint>

namespace dwpt {

/// Incremental SHA-256 (FIPS 180-4). This is the raw compression engine;
/// protocol code goes through dwpt::hash() which adds domain separation
/// and instrumentation.
class Sha256 {
public:
    Sha256() { reset(); }

    void reset();
    Sha256& update(ByteView data);
    Digest32 finish();

    static Digest32 digest(ByteView data) {
        Sha256 h;
        h.update(data);
        return h.finish();
    }

private:
    void process_block(const std::uint8_t* block);

    std::uint32_t state_[8];
    std::uint64_t total_len_ = 0;
    std::uint8_t buffer_[64];
    std::size_t buffer_len_ = 0;
};

}  // namespace dwpt
