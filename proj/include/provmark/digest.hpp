#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>

#include "provmark/hex.hpp"

namespace provmark {

/// SHA-512 of an arbitrary byte string, as 64 raw bytes.
inline std::vector<std::uint8_t> sha512(const void* data, std::size_t len) {
    std::vector<std::uint8_t> out(64);
    unsigned int written = 0;
    if (EVP_Digest(data, len, out.data(), &written, EVP_sha512(), nullptr) != 1 ||
        written != 64) {
        throw std::runtime_error("EVP_Digest(sha512) failed");
    }
    return out;
}

inline std::vector<std::uint8_t> sha512(std::string_view s) {
    return sha512(s.data(), s.size());
}

/// 128 lowercase hex chars.
inline std::string sha512_hex(std::string_view s) {
    return hex::encode(sha512(s));
}

inline std::string sha512_hex(const std::vector<std::uint8_t>& bytes) {
    return hex::encode(sha512(bytes.data(), bytes.size()));
}

} // namespace provmark
