#pragma once

// Shared fixtures for the test suites: deterministic image generators, the
// published LCR measurement matrix, and temp-file helpers.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "provmark/image.hpp"
#include "provmark/lcr.hpp"
#include "provmark/rng.hpp"

namespace testsupport {

inline provmark::RasterImage random_rgb(int w, int h, std::uint64_t seed) {
    auto img = provmark::RasterImage::make(w, h, 3);
    provmark::SplitMix64 gen(seed);
    for (auto& s : img.samples) s = static_cast<std::uint8_t>(gen.next_u64() & 0xff);
    return img;
}

/// Smooth structured content: gradients plus a few blobs. Profiles carry real
/// structure, unlike uniform noise.
inline provmark::RasterImage structured_rgb(int w, int h, std::uint64_t seed) {
    auto img = provmark::RasterImage::make(w, h, 3);
    provmark::SplitMix64 gen(seed);
    double cx1 = gen.next_unit() * w, cy1 = gen.next_unit() * h;
    double cx2 = gen.next_unit() * w, cy2 = gen.next_unit() * h;
    double r1 = 0.15 * w + gen.next_unit() * 0.2 * w;
    double r2 = 0.1 * w + gen.next_unit() * 0.2 * w;
    double base = 40 + gen.next_unit() * 120;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double g = base + 80.0 * x / w + 40.0 * y / h;
            double d1 = std::hypot(x - cx1, y - cy1);
            double d2 = std::hypot(x - cx2, y - cy2);
            double lobe = 70.0 * std::exp(-d1 * d1 / (r1 * r1)) -
                          50.0 * std::exp(-d2 * d2 / (r2 * r2));
            double v = g + lobe;
            img.at(x, y, 0) = provmark::clamp_byte(v);
            img.at(x, y, 1) = provmark::clamp_byte(v * 0.8 + 20);
            img.at(x, y, 2) = provmark::clamp_byte(v * 0.6 + 35);
        }
    }
    return img;
}

/// Fundus-style plate: dark surround, bright disc with radial falloff and a
/// few vessel-like arcs. Stands in for real medical captures.
inline provmark::RasterImage medical_like_rgb(int w, int h, std::uint64_t seed) {
    auto img = provmark::RasterImage::make(w, h, 3);
    provmark::SplitMix64 gen(seed);
    double cx = w / 2.0 + (gen.next_unit() - 0.5) * w * 0.1;
    double cy = h / 2.0 + (gen.next_unit() - 0.5) * h * 0.1;
    double radius = 0.45 * std::min(w, h) * (0.9 + 0.2 * gen.next_unit());
    double vessel_phase = gen.next_unit() * 6.28318;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double d = std::hypot(x - cx, y - cy);
            if (d > radius) {
                img.at(x, y, 0) = 2;
                img.at(x, y, 1) = 1;
                img.at(x, y, 2) = 1;
                continue;
            }
            double falloff = 1.0 - (d / radius) * (d / radius) * 0.7;
            double angle = std::atan2(y - cy, x - cx);
            double vessel =
                std::exp(-std::pow(std::sin(3.0 * angle + vessel_phase + d * 0.02), 2) * 40.0);
            double r = 190 * falloff - 90 * vessel;
            double g = 95 * falloff - 55 * vessel;
            double b = 55 * falloff - 30 * vessel;
            img.at(x, y, 0) = provmark::clamp_byte(r);
            img.at(x, y, 1) = provmark::clamp_byte(g);
            img.at(x, y, 2) = provmark::clamp_byte(b);
        }
    }
    return img;
}

/// The published 4x6 board measurement (L, C, R, Z rows).
inline provmark::LcrFeatureMatrix reference_board_matrix() {
    auto m = provmark::LcrFeatureMatrix::make(6);
    const double L[6] = {253.9e-3, 703.9e-6, 2.828e-3, 2.195e-3, 706.6e-6, 703.5e-6};
    const double C[6] = {997.2e-12, 358.7e-9, 88.92e-9, 114.4e-9, 355.0e-9, 358.0e-9};
    const double R[6] = {9.352e3, 0.546e3, 1.381e3, 1.174e3, 0.547e3, 0.546e3};
    const double Z[6] = {1e-6, 0.304e3, 32.69e3, 15.96e3, 0.305e3, 0.305e3};
    for (int tp = 0; tp < 6; ++tp) {
        m.at(0, tp) = L[tp];
        m.at(1, tp) = C[tp];
        m.at(2, tp) = R[tp];
        m.at(3, tp) = Z[tp];
    }
    return m;
}

inline std::string reference_board_csv() {
    std::string csv = "L,C,R,Z\n";
    auto m = reference_board_matrix();
    char buf[128];
    for (int tp = 0; tp < m.n_testpoints; ++tp) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g\n", m.at(0, tp),
                      m.at(1, tp), m.at(2, tp), m.at(3, tp));
        csv += buf;
    }
    return csv;
}

/// Unique scratch directory per process, removed lazily by the OS temp
/// cleaner; tests that care clean up themselves.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("provmark_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

} // namespace testsupport
