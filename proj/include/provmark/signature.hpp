#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "provmark/errors.hpp"
#include "provmark/hex.hpp"
#include "provmark/image.hpp"

namespace provmark {

/// Spatial-average descriptor of one image: 32 per-grid-row means followed by
/// 32 per-grid-column means, hex-encoded to 128 chars.
struct ImageSignature {
    std::array<std::uint8_t, 32> row_profile{};
    std::array<std::uint8_t, 32> col_profile{};
    std::string hex; // hexencode(row_profile) || hexencode(col_profile)

    static ImageSignature from_hex(std::string_view h) {
        if (h.size() != 128 || !hex::is_lower_hex(h))
            throw BadHexString("image signature must be 128 lowercase hex chars");
        ImageSignature sig;
        auto bytes = hex::decode(h);
        for (int i = 0; i < 32; ++i) {
            sig.row_profile[static_cast<std::size_t>(i)] = bytes[static_cast<std::size_t>(i)];
            sig.col_profile[static_cast<std::size_t>(i)] = bytes[static_cast<std::size_t>(i) + 32];
        }
        sig.hex = std::string(h);
        return sig;
    }

    /// Concatenated 64-byte profile vector (rows then columns).
    std::array<std::uint8_t, 64> profile() const {
        std::array<std::uint8_t, 64> p{};
        for (int i = 0; i < 32; ++i) {
            p[static_cast<std::size_t>(i)] = row_profile[static_cast<std::size_t>(i)];
            p[static_cast<std::size_t>(i) + 32] = col_profile[static_cast<std::size_t>(i)];
        }
        return p;
    }
};

/// Computes the image signature: grayscale -> 32x32 box-average grid ->
/// rounded per-row and per-column means.
inline ImageSignature image_signature(const RasterImage& img) {
    constexpr int n = 32;
    RasterImage gray = to_grayscale(img);
    if (gray.width < 64 || gray.height < 64)
        throw ImageTooSmall("signature needs at least 64x64 pixels, got " +
                            std::to_string(gray.width) + "x" +
                            std::to_string(gray.height));
    auto grid = downscale_grid(gray, n);
    ImageSignature sig;
    for (int i = 0; i < n; ++i) {
        int row_sum = 0, col_sum = 0;
        for (int j = 0; j < n; ++j) {
            row_sum += grid[static_cast<std::size_t>(i) * n + j];
            col_sum += grid[static_cast<std::size_t>(j) * n + i];
        }
        sig.row_profile[static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>(round_half_up(row_sum / static_cast<double>(n)));
        sig.col_profile[static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>(round_half_up(col_sum / static_cast<double>(n)));
    }
    sig.hex = hex::encode(sig.row_profile.data(), 32) + hex::encode(sig.col_profile.data(), 32);
    return sig;
}

/// Pearson correlation over the concatenated 64-byte profiles.
/// Identical vectors give exactly 1.0 (covers the constant-constant case);
/// if only one side is constant the correlation is defined as 0.0.
inline double signature_correlation(const ImageSignature& a, const ImageSignature& b) {
    auto pa = a.profile();
    auto pb = b.profile();
    if (pa == pb) return 1.0;
    double ma = 0, mb = 0;
    for (int i = 0; i < 64; ++i) {
        ma += pa[static_cast<std::size_t>(i)];
        mb += pb[static_cast<std::size_t>(i)];
    }
    ma /= 64.0;
    mb /= 64.0;
    double sab = 0, saa = 0, sbb = 0;
    for (int i = 0; i < 64; ++i) {
        double da = pa[static_cast<std::size_t>(i)] - ma;
        double db = pb[static_cast<std::size_t>(i)] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    double r = sab / std::sqrt(saa * sbb);
    if (r > 1.0) r = 1.0;
    if (r < -1.0) r = -1.0;
    return r;
}

/// Largest absolute per-byte difference between two profiles.
inline int signature_max_byte_delta(const ImageSignature& a, const ImageSignature& b) {
    auto pa = a.profile();
    auto pb = b.profile();
    int worst = 0;
    for (int i = 0; i < 64; ++i) {
        int d = std::abs(static_cast<int>(pa[static_cast<std::size_t>(i)]) -
                         static_cast<int>(pb[static_cast<std::size_t>(i)]));
        worst = std::max(worst, d);
    }
    return worst;
}

} // namespace provmark
