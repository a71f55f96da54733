#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <zlib.h>

#include "provmark/hex.hpp"

namespace provmark {

/// Standard reflected CRC-32 (polynomial 0xEDB88320), as used by zlib/PNG.
inline std::uint32_t crc32_of(std::string_view text) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    crc = ::crc32(crc, reinterpret_cast<const Bytef*>(text.data()),
                  static_cast<uInt>(text.size()));
    return static_cast<std::uint32_t>(crc);
}

/// CRC as 8 lowercase hex chars, most significant byte first.
inline std::string crc32_hex(std::string_view text) {
    std::uint32_t v = crc32_of(text);
    std::string out(8, '0');
    for (int i = 7; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex::kDigits[v & 0x0f];
        v >>= 4;
    }
    return out;
}

} // namespace provmark
