#pragma once

#include <cmath>

namespace provmark {

/// Quantization-index modulation on a single coefficient. Bit 0 uses the
/// lattice {k*delta}, bit 1 the lattice {k*delta + delta/2}, so the embedded
/// value moves the coefficient by at most delta/2.
inline double qim_embed_bit(double c, int bit, double delta) {
    double dither = bit ? delta / 2.0 : 0.0;
    return delta * std::round((c - dither) / delta) + dither;
}

/// Nearest-lattice decoding; exact ties go to bit 0.
inline int qim_decode_bit(double c, double delta) {
    double d0 = std::abs(c - qim_embed_bit(c, 0, delta));
    double d1 = std::abs(c - qim_embed_bit(c, 1, delta));
    return d1 < d0 ? 1 : 0;
}

} // namespace provmark
