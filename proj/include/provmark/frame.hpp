#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "provmark/crc32.hpp"
#include "provmark/device.hpp"
#include "provmark/errors.hpp"
#include "provmark/hex.hpp"
#include "provmark/signature.hpp"

namespace provmark {

/// 256 hex chars: device fingerprint (128) followed by image signature (128).
struct FusedPayload {
    std::string hex;
};

inline FusedPayload fuse_payload(const DeviceFingerprint& dfp, const ImageSignature& sig) {
    if (dfp.hex.size() != 128)
        throw LengthMismatch("device fingerprint must be 128 hex chars");
    if (sig.hex.size() != 128)
        throw LengthMismatch("image signature must be 128 hex chars");
    return FusedPayload{dfp.hex + sig.hex};
}

inline std::pair<std::string, std::string> split_payload(const FusedPayload& p) {
    if (p.hex.size() != 256)
        throw LengthMismatch("fused payload must be 256 hex chars, got " +
                             std::to_string(p.hex.size()));
    return {p.hex.substr(0, 128), p.hex.substr(128, 128)};
}

/// The bit string actually embedded: magic, masked payload, CRC-32 of the
/// preceding hex text. 272 hex chars = 1088 bits.
struct WatermarkFrame {
    static constexpr std::string_view kMagic = "70726d31"; // "prm1"
    static constexpr std::size_t kBodyHexLen = 256;
    static constexpr std::size_t kHexLen = 8 + kBodyHexLen + 8;
    static constexpr std::size_t kBits = kHexLen * 4; // 1088

    std::string body; // masked fused payload, 256 hex chars

    static WatermarkFrame for_body(std::string masked_body) {
        if (masked_body.size() != kBodyHexLen || !hex::is_lower_hex(masked_body))
            throw LengthMismatch("frame body must be 256 lowercase hex chars");
        return WatermarkFrame{std::move(masked_body)};
    }

    std::string to_hex() const {
        std::string text = std::string(kMagic) + body;
        return text + crc32_hex(text);
    }

    /// Validates magic and CRC of a candidate 272-hex-char string. Returns
    /// nothing when either check fails (the NoWatermark outcome).
    static std::optional<WatermarkFrame> parse_hex(std::string_view h) {
        if (h.size() != kHexLen || !hex::is_lower_hex(h)) return std::nullopt;
        if (h.substr(0, 8) != kMagic) return std::nullopt;
        std::string_view text = h.substr(0, 8 + kBodyHexLen);
        if (crc32_hex(text) != h.substr(8 + kBodyHexLen)) return std::nullopt;
        return WatermarkFrame{std::string(h.substr(8, kBodyHexLen))};
    }
};

} // namespace provmark
