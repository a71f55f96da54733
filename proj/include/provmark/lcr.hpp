#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "provmark/errors.hpp"
#include "provmark/hex.hpp"
#include "provmark/rng.hpp"

namespace provmark {

/// Measured board characteristics: 4 rows (L, C, R, Z) x N test points, all
/// entries strictly positive.
struct LcrFeatureMatrix {
    static constexpr int kRows = 4;
    static constexpr std::array<const char*, 4> kRowNames = {"L", "C", "R", "Z"};

    int n_testpoints = 0;
    std::vector<double> values; // row-major, 4 x n

    static LcrFeatureMatrix make(int n) {
        if (n < 2) throw BadMatrixFile("need at least 2 test points");
        LcrFeatureMatrix m;
        m.n_testpoints = n;
        m.values.assign(static_cast<std::size_t>(kRows) * n, 1.0);
        return m;
    }

    double& at(int row, int tp) { return values[static_cast<std::size_t>(row) * n_testpoints + tp]; }
    double at(int row, int tp) const {
        return values[static_cast<std::size_t>(row) * n_testpoints + tp];
    }

    void validate() const {
        for (double v : values)
            if (!(v > 0.0))
                throw NonPositiveEntry("all L/C/R/Z entries must be positive for the "
                                       "logarithm step");
    }

    /// CSV layout is the transpose of the internal matrix: a header row
    /// "L,C,R,Z" followed by one row per test point.
    static LcrFeatureMatrix from_csv(std::istream& in) {
        std::string line;
        if (!std::getline(in, line)) throw BadMatrixFile("empty matrix file");
        {
            std::string hdr;
            for (char c : line)
                if (!std::isspace(static_cast<unsigned char>(c))) hdr.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
            if (hdr != "L,C,R,Z")
                throw BadMatrixFile("expected header row \"L,C,R,Z\", got \"" + line + "\"");
        }
        std::vector<std::array<double, 4>> rows;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
            std::stringstream ss(line);
            std::array<double, 4> tp{};
            std::string cell;
            for (int i = 0; i < 4; ++i) {
                if (!std::getline(ss, cell, ','))
                    throw BadMatrixFile("row with fewer than 4 values: " + line);
                try {
                    tp[static_cast<std::size_t>(i)] = std::stod(cell);
                } catch (const std::exception&) {
                    throw BadMatrixFile("not a number: " + cell);
                }
            }
            if (std::getline(ss, cell, ',') && !cell.empty())
                throw BadMatrixFile("row with more than 4 values: " + line);
            rows.push_back(tp);
        }
        if (rows.size() < 2) throw BadMatrixFile("need at least 2 test points");
        LcrFeatureMatrix m = make(static_cast<int>(rows.size()));
        for (int tp = 0; tp < m.n_testpoints; ++tp)
            for (int row = 0; row < kRows; ++row)
                m.at(row, tp) = rows[static_cast<std::size_t>(tp)][static_cast<std::size_t>(row)];
        m.validate();
        return m;
    }

    static LcrFeatureMatrix from_csv_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoFailure("cannot open matrix file: " + path);
        return from_csv(in);
    }
};

/// 4 x N matrix in the logarithm domain.
struct LogMatrix {
    int n_testpoints = 0;
    std::vector<double> values; // row-major, 4 x n

    double& at(int row, int tp) { return values[static_cast<std::size_t>(row) * n_testpoints + tp]; }
    double at(int row, int tp) const {
        return values[static_cast<std::size_t>(row) * n_testpoints + tp];
    }
};

/// Elementwise base-10 logarithm. Any base gives the same signature; base 10
/// is the canonical internal choice.
inline LogMatrix log_features(const LcrFeatureMatrix& d) {
    d.validate();
    LogMatrix out;
    out.n_testpoints = d.n_testpoints;
    out.values.resize(d.values.size());
    for (std::size_t i = 0; i < d.values.size(); ++i) out.values[i] = std::log10(d.values[i]);
    return out;
}

inline std::array<double, 4> row_means(const LogMatrix& d_log) {
    std::array<double, 4> means{};
    for (int row = 0; row < LcrFeatureMatrix::kRows; ++row) {
        double sum = 0.0;
        for (int tp = 0; tp < d_log.n_testpoints; ++tp) sum += d_log.at(row, tp);
        means[static_cast<std::size_t>(row)] = sum / d_log.n_testpoints;
    }
    return means;
}

/// Per-test-point nibble signature. Row i of `bits` is test point i with
/// columns (L, C, R, Z); the nibble packs L as the most significant bit.
struct BinarySignature {
    int n_testpoints = 0;
    std::vector<std::uint8_t> bits; // row-major, n x 4
    std::string nibbles;            // n lowercase hex chars

    /// Flat bit string in enrollment order: test point 0 (L,C,R,Z), then
    /// test point 1, ...
    const std::vector<std::uint8_t>& flat_bits() const { return bits; }
};

inline BinarySignature binarize_log(const LogMatrix& d_log) {
    auto means = row_means(d_log);
    BinarySignature sig;
    sig.n_testpoints = d_log.n_testpoints;
    sig.bits.assign(static_cast<std::size_t>(d_log.n_testpoints) * 4, 0);
    sig.nibbles.reserve(static_cast<std::size_t>(d_log.n_testpoints));
    for (int tp = 0; tp < d_log.n_testpoints; ++tp) {
        int nibble = 0;
        for (int row = 0; row < LcrFeatureMatrix::kRows; ++row) {
            // Ties count as 1: the comparison is >=.
            int bit = d_log.at(row, tp) >= means[static_cast<std::size_t>(row)] ? 1 : 0;
            sig.bits[static_cast<std::size_t>(tp) * 4 + row] = static_cast<std::uint8_t>(bit);
            nibble = nibble << 1 | bit;
        }
        sig.nibbles.push_back(hex::kDigits[nibble]);
    }
    return sig;
}

inline BinarySignature binarize(const LcrFeatureMatrix& d) {
    return binarize_log(log_features(d));
}

/// Additive noise in the logarithm domain: out = d_log + k_scale * eta with
/// eta i.i.d. uniform on [0,1) from the seeded generator.
struct NoiseModel {
    double k_scale = 0.0;
    std::uint64_t seed = 0;
};

inline LogMatrix inject_noise(const LogMatrix& d_log, const NoiseModel& nm) {
    LogMatrix out = d_log;
    if (nm.k_scale == 0.0) return out;
    SplitMix64 gen(nm.seed);
    for (auto& v : out.values) v += nm.k_scale * gen.next_unit();
    return out;
}

/// Picks `count` columns uniformly at random (without replacement) from a
/// larger measurement matrix, modelling test-point selection.
inline LcrFeatureMatrix subsample_testpoints(const LcrFeatureMatrix& d, int count,
                                             std::uint64_t seed) {
    if (count < 2 || count > d.n_testpoints)
        throw BadMatrixFile("subsample count out of range");
    std::vector<int> order(static_cast<std::size_t>(d.n_testpoints));
    for (int i = 0; i < d.n_testpoints; ++i) order[static_cast<std::size_t>(i)] = i;
    SplitMix64 gen(seed);
    for (int i = d.n_testpoints - 1; i > 0; --i) {
        int j = static_cast<int>(gen.next_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    LcrFeatureMatrix out = LcrFeatureMatrix::make(count);
    for (int tp = 0; tp < count; ++tp)
        for (int row = 0; row < LcrFeatureMatrix::kRows; ++row)
            out.at(row, tp) = d.at(row, order[static_cast<std::size_t>(tp)]);
    return out;
}

} // namespace provmark
