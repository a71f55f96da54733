#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "provmark/errors.hpp"
#include "provmark/image.hpp"

namespace provmark {

/// Dense 2-D grid of reals.
struct Grid {
    int width = 0;
    int height = 0;
    std::vector<double> v;

    static Grid make(int w, int h, double fill = 0.0) {
        Grid g;
        g.width = w;
        g.height = h;
        g.v.assign(static_cast<std::size_t>(w) * h, fill);
        return g;
    }

    double& at(int x, int y) { return v[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }

    bool same_shape(const Grid& o) const { return width == o.width && height == o.height; }
};

/// One level of 2-D Haar subbands (orthonormal scaling: per 2x2 block
/// [a b; c d], LL=(a+b+c+d)/2, LH=(a-b+c-d)/2, HL=(a+b-c-d)/2,
/// HH=(a-b-c+d)/2).
struct Subbands {
    Grid ll, lh, hl, hh;
    int source_width = 0;  // pre-padding dimensions, for exact inversion
    int source_height = 0;
};

/// Extracts one channel of an image into a real grid, padding odd dimensions
/// by edge replication so the block transform tiles evenly.
inline Grid channel_plane(const RasterImage& img, int channel) {
    int pw = img.width + (img.width % 2);
    int ph = img.height + (img.height % 2);
    Grid g = Grid::make(pw, ph);
    for (int y = 0; y < ph; ++y) {
        int sy = y < img.height ? y : img.height - 1;
        for (int x = 0; x < pw; ++x) {
            int sx = x < img.width ? x : img.width - 1;
            g.at(x, y) = img.at(sx, sy, channel);
        }
    }
    return g;
}

inline Subbands dwt_forward(const Grid& plane) {
    // Caller guarantees even dimensions (channel_plane pads).
    Subbands sb;
    int sw = plane.width / 2, sh = plane.height / 2;
    sb.ll = Grid::make(sw, sh);
    sb.lh = Grid::make(sw, sh);
    sb.hl = Grid::make(sw, sh);
    sb.hh = Grid::make(sw, sh);
    sb.source_width = plane.width;
    sb.source_height = plane.height;
    for (int by = 0; by < sh; ++by) {
        for (int bx = 0; bx < sw; ++bx) {
            double a = plane.at(2 * bx, 2 * by);
            double b = plane.at(2 * bx + 1, 2 * by);
            double c = plane.at(2 * bx, 2 * by + 1);
            double d = plane.at(2 * bx + 1, 2 * by + 1);
            sb.ll.at(bx, by) = (a + b + c + d) / 2.0;
            sb.lh.at(bx, by) = (a - b + c - d) / 2.0;
            sb.hl.at(bx, by) = (a + b - c - d) / 2.0;
            sb.hh.at(bx, by) = (a - b - c + d) / 2.0;
        }
    }
    return sb;
}

inline Grid dwt_inverse(const Subbands& sb) {
    if (!sb.ll.same_shape(sb.lh) || !sb.ll.same_shape(sb.hl) || !sb.ll.same_shape(sb.hh))
        throw ShapeMismatch("subband grids differ in shape");
    Grid plane = Grid::make(sb.ll.width * 2, sb.ll.height * 2);
    for (int by = 0; by < sb.ll.height; ++by) {
        for (int bx = 0; bx < sb.ll.width; ++bx) {
            double ll = sb.ll.at(bx, by), lh = sb.lh.at(bx, by);
            double hl = sb.hl.at(bx, by), hh = sb.hh.at(bx, by);
            plane.at(2 * bx, 2 * by) = (ll + lh + hl + hh) / 2.0;
            plane.at(2 * bx + 1, 2 * by) = (ll - lh + hl - hh) / 2.0;
            plane.at(2 * bx, 2 * by + 1) = (ll + lh - hl - hh) / 2.0;
            plane.at(2 * bx + 1, 2 * by + 1) = (ll - lh - hl + hh) / 2.0;
        }
    }
    return plane;
}

/// Writes a plane back into one channel, dropping any replication padding and
/// requantizing to bytes (round-half-up, clamp).
inline void store_channel(RasterImage& img, int channel, const Grid& plane) {
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            img.at(x, y, channel) = clamp_byte(plane.at(x, y));
}

} // namespace provmark
