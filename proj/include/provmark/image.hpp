#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "provmark/errors.hpp"

namespace provmark {

/// 8-bit raster image, row-major, channels interleaved. 1 channel (gray) or
/// 3 channels (RGB).
struct RasterImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> samples;

    static RasterImage make(int w, int h, int c, std::uint8_t fill = 0) {
        if (w <= 0 || h <= 0 || (c != 1 && c != 3))
            throw UnsupportedChannelCount("bad image shape " + std::to_string(w) +
                                          "x" + std::to_string(h) + "x" +
                                          std::to_string(c));
        RasterImage img;
        img.width = w;
        img.height = h;
        img.channels = c;
        img.samples.assign(static_cast<std::size_t>(w) * h * c, fill);
        return img;
    }

    std::uint8_t& at(int x, int y, int c = 0) {
        return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t at(int x, int y, int c = 0) const {
        return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    bool same_shape(const RasterImage& other) const {
        return width == other.width && height == other.height &&
               channels == other.channels;
    }
};

/// Round half away from zero; all inputs here are non-negative so this is
/// round-half-up.
inline int round_half_up(double v) {
    return static_cast<int>(std::floor(v + 0.5));
}

inline std::uint8_t clamp_byte(double v) {
    int r = round_half_up(v);
    if (r < 0) r = 0;
    if (r > 255) r = 255;
    return static_cast<std::uint8_t>(r);
}

/// ITU-R BT.601 luma: round(0.299 R + 0.587 G + 0.114 B). Gray input is
/// returned unchanged.
inline RasterImage to_grayscale(const RasterImage& img) {
    if (img.channels == 1) return img;
    if (img.channels != 3)
        throw UnsupportedChannelCount("expected 1 or 3 channels, got " +
                                      std::to_string(img.channels));
    RasterImage gray = RasterImage::make(img.width, img.height, 1);
    const std::uint8_t* src = img.samples.data();
    std::uint8_t* dst = gray.samples.data();
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < n; ++i) {
        double y = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2];
        dst[i] = clamp_byte(y);
    }
    return gray;
}

/// n x n byte grid of rounded box averages. Tile boundaries sit at
/// round(i * dim / n), so uneven dimensions partition into uneven tiles.
inline std::vector<std::uint8_t> downscale_grid(const RasterImage& gray, int n = 32) {
    if (gray.channels != 1)
        throw UnsupportedChannelCount("downscale_grid expects a grayscale image");
    if (gray.width < n || gray.height < n)
        throw ImageTooSmall("image " + std::to_string(gray.width) + "x" +
                            std::to_string(gray.height) + " smaller than grid " +
                            std::to_string(n) + "x" + std::to_string(n));
    auto boundary = [n](int i, int dim) { return round_half_up(static_cast<double>(i) * dim / n); };
    std::vector<std::uint8_t> grid(static_cast<std::size_t>(n) * n);
    for (int gy = 0; gy < n; ++gy) {
        int y0 = boundary(gy, gray.height), y1 = boundary(gy + 1, gray.height);
        for (int gx = 0; gx < n; ++gx) {
            int x0 = boundary(gx, gray.width), x1 = boundary(gx + 1, gray.width);
            long long sum = 0;
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x) sum += gray.at(x, y);
            long long count = static_cast<long long>(y1 - y0) * (x1 - x0);
            grid[static_cast<std::size_t>(gy) * n + gx] =
                static_cast<std::uint8_t>(round_half_up(static_cast<double>(sum) / count));
        }
    }
    return grid;
}

} // namespace provmark
