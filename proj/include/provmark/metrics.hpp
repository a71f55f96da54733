#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "provmark/dwt.hpp"
#include "provmark/errors.hpp"
#include "provmark/image.hpp"

namespace provmark {

inline double psnr_from_mse(double mse) {
    if (mse <= 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

namespace detail {

inline void require_same_shape(const RasterImage& a, const RasterImage& b) {
    if (!a.same_shape(b))
        throw ShapeMismatch("images differ in shape: " + std::to_string(a.width) + "x" +
                            std::to_string(a.height) + "x" + std::to_string(a.channels) +
                            " vs " + std::to_string(b.width) + "x" +
                            std::to_string(b.height) + "x" + std::to_string(b.channels));
}

inline Grid plane_of(const RasterImage& img, int channel) {
    Grid g = Grid::make(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) g.at(x, y) = img.at(x, y, channel);
    return g;
}

/// Summed-area table; sums are over [0,x) x [0,y).
class Integral {
public:
    explicit Integral(const Grid& g) : w_(g.width), h_(g.height), s_((w_ + 1) * (h_ + 1), 0.0) {
        for (int y = 0; y < h_; ++y) {
            double run = 0.0;
            for (int x = 0; x < w_; ++x) {
                run += g.at(x, y);
                s_[idx(x + 1, y + 1)] = s_[idx(x + 1, y)] + run;
            }
        }
    }

    double window_sum(int x0, int y0, int n) const {
        return s_[idx(x0 + n, y0 + n)] - s_[idx(x0, y0 + n)] - s_[idx(x0 + n, y0)] +
               s_[idx(x0, y0)];
    }

private:
    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * (w_ + 1) + x;
    }
    int w_, h_;
    std::vector<double> s_;
};

inline Grid product(const Grid& a, const Grid& b) {
    Grid g = Grid::make(a.width, a.height);
    for (std::size_t i = 0; i < g.v.size(); ++i) g.v[i] = a.v[i] * b.v[i];
    return g;
}

/// Valid-region separable convolution with a symmetric 1-D kernel.
inline Grid filter_valid(const Grid& g, const std::vector<double>& k) {
    int r = static_cast<int>(k.size());
    Grid hpass = Grid::make(g.width - r + 1, g.height);
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < hpass.width; ++x) {
            double acc = 0.0;
            for (int t = 0; t < r; ++t) acc += k[static_cast<std::size_t>(t)] * g.at(x + t, y);
            hpass.at(x, y) = acc;
        }
    Grid out = Grid::make(hpass.width, g.height - r + 1);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) {
            double acc = 0.0;
            for (int t = 0; t < r; ++t) acc += k[static_cast<std::size_t>(t)] * hpass.at(x, y + t);
            out.at(x, y) = acc;
        }
    return out;
}

inline std::vector<double> gaussian_kernel(int taps, double sigma) {
    std::vector<double> k(static_cast<std::size_t>(taps));
    double mid = (taps - 1) / 2.0, sum = 0.0;
    for (int i = 0; i < taps; ++i) {
        double d = i - mid;
        k[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += k[static_cast<std::size_t>(i)];
    }
    for (auto& v : k) v /= sum;
    return k;
}

struct SsimTerms {
    double ssim_mean;
    double cs_mean;
};

inline SsimTerms ssim_plane(const Grid& x, const Grid& y) {
    constexpr double C1 = (0.01 * 255) * (0.01 * 255);
    constexpr double C2 = (0.03 * 255) * (0.03 * 255);
    static const std::vector<double> kernel = gaussian_kernel(11, 1.5);

    Grid mu1 = filter_valid(x, kernel);
    Grid mu2 = filter_valid(y, kernel);
    Grid xx = filter_valid(product(x, x), kernel);
    Grid yy = filter_valid(product(y, y), kernel);
    Grid xy = filter_valid(product(x, y), kernel);

    double ssim_sum = 0.0, cs_sum = 0.0;
    for (std::size_t i = 0; i < mu1.v.size(); ++i) {
        double m1 = mu1.v[i], m2 = mu2.v[i];
        double sx = xx.v[i] - m1 * m1;
        double sy = yy.v[i] - m2 * m2;
        double sxy = xy.v[i] - m1 * m2;
        double cs = (2.0 * sxy + C2) / (sx + sy + C2);
        ssim_sum += cs * (2.0 * m1 * m2 + C1) / (m1 * m1 + m2 * m2 + C1);
        cs_sum += cs;
    }
    double n = static_cast<double>(mu1.v.size());
    return {ssim_sum / n, cs_sum / n};
}

inline Grid downsample2(const Grid& g) {
    Grid out = Grid::make(g.width / 2, g.height / 2);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            out.at(x, y) = (g.at(2 * x, 2 * y) + g.at(2 * x + 1, 2 * y) +
                            g.at(2 * x, 2 * y + 1) + g.at(2 * x + 1, 2 * y + 1)) /
                           4.0;
    return out;
}

} // namespace detail

/// Mean squared sample difference over all channels.
inline double mse(const RasterImage& ref, const RasterImage& test) {
    detail::require_same_shape(ref, test);
    double acc = 0.0;
    for (std::size_t i = 0; i < ref.samples.size(); ++i) {
        double d = static_cast<double>(ref.samples[i]) - test.samples[i];
        acc += d * d;
    }
    return acc / static_cast<double>(ref.samples.size());
}

inline double rmse(const RasterImage& ref, const RasterImage& test) {
    return std::sqrt(mse(ref, test));
}

inline double psnr(const RasterImage& ref, const RasterImage& test) {
    return psnr_from_mse(mse(ref, test));
}

/// Mean over all stride-1 window positions (per channel plane) of the
/// per-window RMSE.
inline double rmse_sw(const RasterImage& ref, const RasterImage& test, int window = 8) {
    detail::require_same_shape(ref, test);
    if (window > ref.width || window > ref.height)
        throw WindowTooLarge("window " + std::to_string(window) + " exceeds image " +
                             std::to_string(ref.width) + "x" + std::to_string(ref.height));
    double total = 0.0;
    std::size_t count = 0;
    const double n = static_cast<double>(window) * window;
    for (int c = 0; c < ref.channels; ++c) {
        Grid a = detail::plane_of(ref, c);
        Grid b = detail::plane_of(test, c);
        Grid d2 = Grid::make(a.width, a.height);
        for (std::size_t i = 0; i < d2.v.size(); ++i) {
            double d = a.v[i] - b.v[i];
            d2.v[i] = d * d;
        }
        detail::Integral integral(d2);
        for (int y = 0; y + window <= ref.height; ++y)
            for (int x = 0; x + window <= ref.width; ++x) {
                total += std::sqrt(integral.window_sum(x, y, window) / n);
                ++count;
            }
    }
    return total / static_cast<double>(count);
}

/// Universal quality index, averaged over stride-1 windows of every channel.
/// Windows with a zero denominator contribute 1 when the two windows hold
/// identical samples and are skipped otherwise.
inline double uqi(const RasterImage& ref, const RasterImage& test, int window = 8) {
    detail::require_same_shape(ref, test);
    if (window > ref.width || window > ref.height)
        throw WindowTooLarge("window exceeds image");
    double total = 0.0;
    std::size_t count = 0;
    const double n = static_cast<double>(window) * window;
    for (int c = 0; c < ref.channels; ++c) {
        Grid x = detail::plane_of(ref, c);
        Grid y = detail::plane_of(test, c);
        detail::Integral sx(x), sy(y);
        detail::Integral sxx(detail::product(x, x)), syy(detail::product(y, y));
        detail::Integral sxy(detail::product(x, y));
        for (int wy = 0; wy + window <= ref.height; ++wy)
            for (int wx = 0; wx + window <= ref.width; ++wx) {
                double mx = sx.window_sum(wx, wy, window) / n;
                double my = sy.window_sum(wx, wy, window) / n;
                double vx = sxx.window_sum(wx, wy, window) / n - mx * mx;
                double vy = syy.window_sum(wx, wy, window) / n - my * my;
                double cxy = sxy.window_sum(wx, wy, window) / n - mx * my;
                double denom = (vx + vy) * (mx * mx + my * my);
                if (denom == 0.0) {
                    if (mx == my && vx == vy) {
                        total += 1.0;
                        ++count;
                    }
                    continue;
                }
                total += 4.0 * cxy * mx * my / denom;
                ++count;
            }
    }
    return count ? total / static_cast<double>(count) : 1.0;
}

/// SSIM with the canonical 11x11 Gaussian window (sigma 1.5), averaged over
/// the valid map and over channels.
inline double ssim(const RasterImage& ref, const RasterImage& test) {
    detail::require_same_shape(ref, test);
    if (ref.width < 11 || ref.height < 11)
        throw ImageTooSmall("ssim needs at least 11x11 pixels");
    double acc = 0.0;
    for (int c = 0; c < ref.channels; ++c)
        acc += detail::ssim_plane(detail::plane_of(ref, c), detail::plane_of(test, c)).ssim_mean;
    return acc / ref.channels;
}

/// 5-scale MS-SSIM with the standard weights and dyadic downsampling.
inline double msssim(const RasterImage& ref, const RasterImage& test) {
    detail::require_same_shape(ref, test);
    static constexpr std::array<double, 5> kWeights = {0.0448, 0.2856, 0.3001, 0.2363,
                                                       0.1333};
    if (ref.width < 176 || ref.height < 176)
        throw ImageTooSmall("5-scale ms-ssim needs at least 176x176 pixels");
    double acc = 0.0;
    for (int c = 0; c < ref.channels; ++c) {
        Grid x = detail::plane_of(ref, c);
        Grid y = detail::plane_of(test, c);
        double value = 1.0;
        for (std::size_t scale = 0; scale < kWeights.size(); ++scale) {
            auto terms = detail::ssim_plane(x, y);
            bool last = scale + 1 == kWeights.size();
            double term = last ? terms.ssim_mean : terms.cs_mean;
            if (term < 0.0) term = 0.0;
            value *= std::pow(term, kWeights[scale]);
            if (!last) {
                x = detail::downsample2(x);
                y = detail::downsample2(y);
            }
        }
        acc += value;
    }
    return acc / ref.channels;
}

struct SpectralMetrics {
    std::optional<double> ergas; // needs nonzero per-channel reference means
    double scc = 0.0;
    std::optional<double> rase;    // needs nonzero global reference mean
    std::optional<double> sam_rad; // multi-channel only
};

/// ERGAS (h/l = 1), RASE, SAM and the Laplacian spectral correlation
/// coefficient.
inline SpectralMetrics spectral_metrics(const RasterImage& ref, const RasterImage& test) {
    detail::require_same_shape(ref, test);
    SpectralMetrics out;

    // Per-channel RMSE and reference means.
    std::vector<double> rmse_k(static_cast<std::size_t>(ref.channels), 0.0);
    std::vector<double> mu_k(static_cast<std::size_t>(ref.channels), 0.0);
    const std::size_t per = static_cast<std::size_t>(ref.width) * ref.height;
    for (int c = 0; c < ref.channels; ++c) {
        double se = 0.0, sum = 0.0;
        for (int y = 0; y < ref.height; ++y)
            for (int x = 0; x < ref.width; ++x) {
                double r = ref.at(x, y, c), t = test.at(x, y, c);
                se += (r - t) * (r - t);
                sum += r;
            }
        rmse_k[static_cast<std::size_t>(c)] = std::sqrt(se / static_cast<double>(per));
        mu_k[static_cast<std::size_t>(c)] = sum / static_cast<double>(per);
    }

    bool any_zero_mean = false;
    double ergas_acc = 0.0, rase_acc = 0.0, mu_all = 0.0;
    for (int c = 0; c < ref.channels; ++c) {
        double m = mu_k[static_cast<std::size_t>(c)], r = rmse_k[static_cast<std::size_t>(c)];
        if (m == 0.0) any_zero_mean = true;
        else ergas_acc += (r / m) * (r / m);
        rase_acc += r * r;
        mu_all += m;
    }
    mu_all /= ref.channels;
    if (!any_zero_mean)
        out.ergas = 100.0 * std::sqrt(ergas_acc / ref.channels);
    if (mu_all != 0.0)
        out.rase = 100.0 / mu_all * std::sqrt(rase_acc / ref.channels);

    // SAM: mean angle between per-pixel channel vectors; zero vectors skipped.
    if (ref.channels > 1) {
        double angle_sum = 0.0;
        std::size_t angle_count = 0;
        for (int y = 0; y < ref.height; ++y)
            for (int x = 0; x < ref.width; ++x) {
                double dot = 0.0, na = 0.0, nb = 0.0;
                for (int c = 0; c < ref.channels; ++c) {
                    double a = ref.at(x, y, c), b = test.at(x, y, c);
                    dot += a * b;
                    na += a * a;
                    nb += b * b;
                }
                if (na == 0.0 || nb == 0.0) continue;
                double cosv = dot / std::sqrt(na * nb);
                if (cosv > 1.0) cosv = 1.0;
                if (cosv < -1.0) cosv = -1.0;
                angle_sum += std::acos(cosv);
                ++angle_count;
            }
        out.sam_rad = angle_count ? angle_sum / static_cast<double>(angle_count) : 0.0;
    }

    // SCC: Pearson correlation of 3x3 Laplacian responses, valid region,
    // averaged over channels. Kernel: 8-neighbour Laplacian.
    double scc_acc = 0.0;
    for (int c = 0; c < ref.channels; ++c) {
        Grid a = detail::plane_of(ref, c);
        Grid b = detail::plane_of(test, c);
        auto laplacian = [](const Grid& g, int x, int y) {
            return 8.0 * g.at(x, y) - g.at(x - 1, y - 1) - g.at(x, y - 1) -
                   g.at(x + 1, y - 1) - g.at(x - 1, y) - g.at(x + 1, y) -
                   g.at(x - 1, y + 1) - g.at(x, y + 1) - g.at(x + 1, y + 1);
        };
        std::vector<double> ha, hb;
        ha.reserve(static_cast<std::size_t>(ref.width - 2) * (ref.height - 2));
        hb.reserve(ha.capacity());
        for (int y = 1; y + 1 < ref.height; ++y)
            for (int x = 1; x + 1 < ref.width; ++x) {
                ha.push_back(laplacian(a, x, y));
                hb.push_back(laplacian(b, x, y));
            }
        if (ha == hb) {
            scc_acc += 1.0;
            continue;
        }
        double ma = 0.0, mb2 = 0.0;
        for (std::size_t i = 0; i < ha.size(); ++i) {
            ma += ha[i];
            mb2 += hb[i];
        }
        ma /= static_cast<double>(ha.size());
        mb2 /= static_cast<double>(hb.size());
        double sab = 0.0, saa = 0.0, sbb = 0.0;
        for (std::size_t i = 0; i < ha.size(); ++i) {
            double da = ha[i] - ma, db = hb[i] - mb2;
            sab += da * db;
            saa += da * da;
            sbb += db * db;
        }
        scc_acc += (saa == 0.0 || sbb == 0.0) ? 0.0 : sab / std::sqrt(saa * sbb);
    }
    out.scc = scc_acc / ref.channels;
    return out;
}

/// PSNR penalized by the blocking-effect factor of the error image: BEF is
/// the mean squared difference across 8-aligned block boundaries minus the
/// within-block one, floored at 0, measured on the luminance plane of
/// (test - ref).
inline double psnrb(const RasterImage& ref, const RasterImage& test, int block = 8) {
    detail::require_same_shape(ref, test);
    RasterImage gr = to_grayscale(ref);
    RasterImage gt = to_grayscale(test);
    Grid err = Grid::make(ref.width, ref.height);
    for (int y = 0; y < ref.height; ++y)
        for (int x = 0; x < ref.width; ++x)
            err.at(x, y) = static_cast<double>(gt.at(x, y)) - gr.at(x, y);

    double boundary_sum = 0.0, inner_sum = 0.0;
    std::size_t boundary_n = 0, inner_n = 0;
    auto tally = [&](double d, bool at_boundary) {
        if (at_boundary) {
            boundary_sum += d * d;
            ++boundary_n;
        } else {
            inner_sum += d * d;
            ++inner_n;
        }
    };
    for (int y = 0; y < ref.height; ++y)
        for (int x = 0; x + 1 < ref.width; ++x)
            tally(err.at(x + 1, y) - err.at(x, y), (x + 1) % block == 0);
    for (int y = 0; y + 1 < ref.height; ++y)
        for (int x = 0; x < ref.width; ++x)
            tally(err.at(x, y + 1) - err.at(x, y), (y + 1) % block == 0);

    double d_b = boundary_n ? boundary_sum / static_cast<double>(boundary_n) : 0.0;
    double d_bc = inner_n ? inner_sum / static_cast<double>(inner_n) : 0.0;
    double bef = d_b > d_bc ? d_b - d_bc : 0.0;
    return psnr_from_mse(mse(ref, test) + bef);
}

/// Aggregate of every metric in the evaluation suite. Optional fields are
/// absent when the metric is undefined for the input pair (SAM on grayscale,
/// ERGAS/RASE on zero-mean references). Infinite PSNRs stay +inf here and
/// serialize as null.
struct QualityReport {
    double mse = 0.0;
    double rmse = 0.0;
    double psnr_db = 0.0;
    double rmse_sw = 0.0;
    double uqi = 0.0;
    double ssim = 0.0;
    std::optional<double> ergas;
    double scc = 0.0;
    std::optional<double> rase;
    std::optional<double> sam_rad;
    std::optional<double> msssim; // needs 176x176
    double psnrb_db = 0.0;

    nlohmann::json to_json() const {
        auto num = [](double v) -> nlohmann::json {
            if (std::isinf(v) || std::isnan(v)) return nullptr;
            return v;
        };
        auto opt = [&num](const std::optional<double>& v) -> nlohmann::json {
            return v ? num(*v) : nlohmann::json(nullptr);
        };
        return {{"mse", num(mse)},       {"rmse", num(rmse)},
                {"psnr_db", num(psnr_db)}, {"rmse_sw", num(rmse_sw)},
                {"uqi", num(uqi)},       {"ssim", num(ssim)},
                {"ergas", opt(ergas)},   {"scc", num(scc)},
                {"rase", opt(rase)},     {"sam_rad", opt(sam_rad)},
                {"msssim", opt(msssim)}, {"psnrb_db", num(psnrb_db)}};
    }

    std::string csv_header() const {
        return "mse,rmse,psnr_db,rmse_sw,uqi,ssim,ergas,scc,rase,sam_rad,msssim,psnrb_db";
    }

    std::string csv_row() const {
        auto cell = [](double v) {
            if (std::isinf(v) || std::isnan(v)) return std::string();
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.9g", v);
            return std::string(buf);
        };
        auto ocell = [&cell](const std::optional<double>& v) {
            return v ? cell(*v) : std::string();
        };
        return cell(mse) + "," + cell(rmse) + "," + cell(psnr_db) + "," + cell(rmse_sw) +
               "," + cell(uqi) + "," + cell(ssim) + "," + ocell(ergas) + "," + cell(scc) +
               "," + ocell(rase) + "," + ocell(sam_rad) + "," + ocell(msssim) + "," +
               cell(psnrb_db);
    }
};

inline QualityReport quality_report(const RasterImage& ref, const RasterImage& test) {
    QualityReport r;
    r.mse = mse(ref, test);
    r.rmse = std::sqrt(r.mse);
    r.psnr_db = psnr_from_mse(r.mse);
    r.rmse_sw = rmse_sw(ref, test);
    r.uqi = uqi(ref, test);
    r.ssim = ssim(ref, test);
    auto spectral = spectral_metrics(ref, test);
    r.ergas = spectral.ergas;
    r.scc = spectral.scc;
    r.rase = spectral.rase;
    r.sam_rad = spectral.sam_rad;
    if (ref.width >= 176 && ref.height >= 176) r.msssim = msssim(ref, test);
    r.psnrb_db = psnrb(ref, test);
    return r;
}

} // namespace provmark
