#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "provmark/errors.hpp"
#include "provmark/lcr.hpp"
#include "provmark/rng.hpp"

namespace provmark {

using BitString = std::vector<std::uint8_t>;

inline std::string bits_to_text(const BitString& bits) {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) s.push_back(b ? '1' : '0');
    return s;
}

inline BitString bits_from_text(std::string_view text) {
    BitString bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') throw BadHexString("bit string may only contain 0/1");
        bits.push_back(c == '1' ? 1 : 0);
    }
    return bits;
}

/// Code-offset secure sketch over a (2t+1)-repetition code. The helper string
/// is public; the key is stored only in the registry. Correction is exact for
/// any noisy signature within Hamming distance t of the enrolled one.
struct FuzzySketch {
    BitString helper; // length 4N; trailing bits beyond the last full block
                      // are the signature bits verbatim (XOR zero) and carry
                      // no key material
    int t = 0;
    int key_bits = 0;
};

/// Enrollment: draws a random key of floor(4N / (2t+1)) bits, expands it with
/// the repetition code and offsets the signature with it.
inline std::pair<BitString, FuzzySketch> fe_generate(const BinarySignature& sig, int t,
                                                     std::uint64_t key_seed) {
    const int n = static_cast<int>(sig.flat_bits().size());
    const int block = 2 * t + 1;
    if (t < 0 || n < block)
        throw SignatureTooShort("signature of " + std::to_string(n) +
                                " bits cannot support t=" + std::to_string(t));
    const int key_bits = n / block;

    BitString key(static_cast<std::size_t>(key_bits));
    SplitMix64 gen(key_seed);
    for (auto& b : key) b = static_cast<std::uint8_t>(gen.next_u64() & 1);

    FuzzySketch sketch;
    sketch.t = t;
    sketch.key_bits = key_bits;
    sketch.helper = sig.flat_bits();
    for (int i = 0; i < key_bits; ++i)
        for (int j = 0; j < block; ++j)
            sketch.helper[static_cast<std::size_t>(i * block + j)] ^= key[static_cast<std::size_t>(i)];
    return {std::move(key), std::move(sketch)};
}

/// Reproduction: majority-decodes each (2t+1) block of noisy XOR helper.
/// Distances beyond t may return a wrong key; callers compare against the
/// registry copy.
inline BitString fe_reproduce(const BinarySignature& noisy, const FuzzySketch& sketch,
                              int t) {
    const auto& bits = noisy.flat_bits();
    if (bits.size() != sketch.helper.size())
        throw LengthMismatch("noisy signature has " + std::to_string(bits.size()) +
                             " bits, sketch expects " +
                             std::to_string(sketch.helper.size()));
    const int block = 2 * t + 1;
    const int key_bits = static_cast<int>(bits.size()) / block;
    BitString key(static_cast<std::size_t>(key_bits));
    for (int i = 0; i < key_bits; ++i) {
        int ones = 0;
        for (int j = 0; j < block; ++j) {
            std::size_t k = static_cast<std::size_t>(i * block + j);
            ones += bits[k] ^ sketch.helper[k];
        }
        key[static_cast<std::size_t>(i)] = ones * 2 > block ? 1 : 0;
    }
    return key;
}

inline bool authenticate(const BitString& claimed_key, const BitString& registry_key) {
    return claimed_key == registry_key;
}

/// One row of an accuracy sweep.
struct SweepPoint {
    double k_scale = 0.0;
    int trials = 0;
    int accepts = 0;
    double accuracy = 0.0;
};

/// Monte-Carlo authentication accuracy: enroll once on the clean signature,
/// then per noise scale run `trials` of inject-noise -> binarize ->
/// reproduce -> authenticate. Noise streams depend only on (seed, K index,
/// trial), so sweeps with different t pair up trial for trial.
inline std::vector<SweepPoint> accuracy_sweep(const LcrFeatureMatrix& d, int t,
                                              const std::vector<double>& k_values,
                                              int trials, std::uint64_t seed) {
    if (trials < 1) throw BadMatrixFile("trials must be >= 1");
    LogMatrix clean = log_features(d);
    BinarySignature enrolled = binarize_log(clean);
    auto [registry_key, sketch] = fe_generate(enrolled, t, derive_seed(seed, 0xceceULL));

    std::vector<SweepPoint> table;
    table.reserve(k_values.size());
    for (std::size_t ki = 0; ki < k_values.size(); ++ki) {
        SweepPoint point;
        point.k_scale = k_values[ki];
        point.trials = trials;
        std::uint64_t k_stream = derive_seed(seed, ki + 1);
        for (int trial = 0; trial < trials; ++trial) {
            NoiseModel nm{point.k_scale, derive_seed(k_stream, static_cast<std::uint64_t>(trial))};
            BinarySignature noisy = binarize_log(inject_noise(clean, nm));
            BitString claimed = fe_reproduce(noisy, sketch, t);
            if (authenticate(claimed, registry_key)) ++point.accepts;
        }
        // Accuracy reduces to TP/(TP+FP): every trial claims the enrolled
        // identity, so TN = FN = 0.
        point.accuracy = static_cast<double>(point.accepts) / trials;
        table.push_back(point);
    }
    return table;
}

inline std::string sweep_csv(const std::vector<SweepPoint>& table) {
    std::string out = "k,trials,accepts,accuracy\n";
    char buf[96];
    for (const auto& p : table) {
        std::snprintf(buf, sizeof buf, "%g,%d,%d,%.6f\n", p.k_scale, p.trials, p.accepts,
                      p.accuracy);
        out += buf;
    }
    return out;
}

} // namespace provmark
