#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "provmark/dwt.hpp"
#include "provmark/errors.hpp"
#include "provmark/frame.hpp"
#include "provmark/hex.hpp"
#include "provmark/image.hpp"
#include "provmark/qim.hpp"

namespace provmark {

/// Where and how strongly the frame is embedded: QIM step `delta` on the
/// level-1 HL then LH coefficients of the blue channel, each frame bit
/// repeated `redundancy` times on consecutive coefficients.
struct SubbandPlan {
    double delta = 8.0;
    int redundancy = 3;

    static constexpr int kMaxRedundancy = 31;

    static std::size_t capacity_for(int width, int height) {
        std::size_t sw = static_cast<std::size_t>(width + width % 2) / 2;
        std::size_t sh = static_cast<std::size_t>(height + height % 2) / 2;
        return 2 * sw * sh; // |HL| + |LH|
    }

    /// Default plan for an image: the largest odd redundancy the capacity
    /// allows, capped at 31.
    static SubbandPlan for_image(int width, int height, double delta = 8.0) {
        std::size_t cap = capacity_for(width, height);
        std::size_t r = cap / WatermarkFrame::kBits;
        if (r > kMaxRedundancy) r = kMaxRedundancy;
        if (r % 2 == 0) --r;
        if (r < 3)
            throw CapacityExceeded("image " + std::to_string(width) + "x" +
                                   std::to_string(height) + " cannot hold " +
                                   std::to_string(WatermarkFrame::kBits) +
                                   " bits at redundancy >= 3");
        SubbandPlan plan;
        plan.delta = delta;
        plan.redundancy = static_cast<int>(r);
        return plan;
    }

    void validate_against(int width, int height) const {
        if (delta <= 0.0) throw CapacityExceeded("delta must be positive");
        if (redundancy < 3 || redundancy % 2 == 0)
            throw CapacityExceeded("redundancy must be an odd count >= 3");
        if (capacity_for(width, height) <
            WatermarkFrame::kBits * static_cast<std::size_t>(redundancy))
            throw CapacityExceeded("subband capacity " +
                                   std::to_string(capacity_for(width, height)) +
                                   " < required " +
                                   std::to_string(WatermarkFrame::kBits *
                                                  static_cast<std::size_t>(redundancy)));
    }
};

namespace detail {

// Carrier order: all HL coefficients in raster order, then all LH.
inline double* carrier_slot(Subbands& sb, std::size_t index) {
    std::size_t per = sb.hl.v.size();
    return index < per ? &sb.hl.v[index] : &sb.lh.v[index - per];
}

} // namespace detail

/// Embeds the frame into the blue channel of an RGB image. Red, green, LL and
/// HH are untouched; output pixels are rounded and clamped to [0,255].
inline RasterImage embed_frame(const RasterImage& img, const WatermarkFrame& frame,
                               const SubbandPlan& plan) {
    if (img.channels != 3) throw NotRGB("embedding requires an RGB image");
    plan.validate_against(img.width, img.height);

    Subbands sb = dwt_forward(channel_plane(img, 2));
    auto bits = hex::to_bits(frame.to_hex());
    std::size_t idx = 0;
    for (std::uint8_t bit : bits) {
        for (int rep = 0; rep < plan.redundancy; ++rep, ++idx) {
            double* c = detail::carrier_slot(sb, idx);
            *c = qim_embed_bit(*c, bit, plan.delta);
        }
    }

    RasterImage out = img;
    store_channel(out, 2, dwt_inverse(sb));
    return out;
}

/// Blind extraction: majority vote per redundancy group, then magic + CRC
/// validation. Returns nothing (NoWatermark) when validation fails.
inline std::optional<WatermarkFrame> extract_frame(const RasterImage& img,
                                                   const SubbandPlan& plan) {
    if (img.channels != 3) throw NotRGB("extraction requires an RGB image");
    if (SubbandPlan::capacity_for(img.width, img.height) <
        WatermarkFrame::kBits * static_cast<std::size_t>(plan.redundancy))
        throw DimensionsTooSmall("image too small for the given plan");

    Subbands sb = dwt_forward(channel_plane(img, 2));
    std::vector<std::uint8_t> bits(WatermarkFrame::kBits);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        int ones = 0;
        for (int rep = 0; rep < plan.redundancy; ++rep, ++idx)
            ones += qim_decode_bit(*detail::carrier_slot(sb, idx), plan.delta);
        bits[i] = ones * 2 > plan.redundancy ? 1 : 0;
    }
    return WatermarkFrame::parse_hex(hex::from_bits(bits));
}

} // namespace provmark
