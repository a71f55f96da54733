#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "provmark/errors.hpp"

namespace provmark::hex {

inline constexpr char kDigits[] = "0123456789abcdef";

inline bool is_lower_hex(std::string_view s) {
    for (char c : s) {
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    }
    return true;
}

inline int nibble_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    throw BadHexString(std::string("not a lowercase hex digit: '") + c + "'");
}

inline std::string encode(const std::uint8_t* data, std::size_t len) {
    std::string out;
    out.reserve(len * 2);
    for (std::size_t i = 0; i < len; ++i) {
        out.push_back(kDigits[data[i] >> 4]);
        out.push_back(kDigits[data[i] & 0x0f]);
    }
    return out;
}

inline std::string encode(const std::vector<std::uint8_t>& data) {
    return encode(data.data(), data.size());
}

inline std::vector<std::uint8_t> decode(std::string_view s) {
    if (s.size() % 2 != 0) throw BadHexString("odd-length hex string");
    std::vector<std::uint8_t> out(s.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>(nibble_value(s[2 * i]) << 4 |
                                           nibble_value(s[2 * i + 1]));
    }
    return out;
}

/// Nibble-wise XOR of two equal-length hex strings.
inline std::string xor_nibbles(std::string_view a, std::string_view b) {
    if (a.size() != b.size())
        throw LengthMismatch("hex operands differ in length (" +
                             std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()) + ")");
    std::string out(a.size(), '0');
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = kDigits[nibble_value(a[i]) ^ nibble_value(b[i])];
    return out;
}

/// Expands a hex string into bits, MSB of each nibble first.
inline std::vector<std::uint8_t> to_bits(std::string_view s) {
    std::vector<std::uint8_t> bits;
    bits.reserve(s.size() * 4);
    for (char c : s) {
        int v = nibble_value(c);
        for (int k = 3; k >= 0; --k) bits.push_back(static_cast<std::uint8_t>((v >> k) & 1));
    }
    return bits;
}

/// Inverse of to_bits; bit count must be a multiple of 4.
inline std::string from_bits(const std::vector<std::uint8_t>& bits) {
    if (bits.size() % 4 != 0) throw LengthMismatch("bit count not a multiple of 4");
    std::string out;
    out.reserve(bits.size() / 4);
    for (std::size_t i = 0; i < bits.size(); i += 4) {
        int v = bits[i] << 3 | bits[i + 1] << 2 | bits[i + 2] << 1 | bits[i + 3];
        out.push_back(kDigits[v]);
    }
    return out;
}

} // namespace provmark::hex
