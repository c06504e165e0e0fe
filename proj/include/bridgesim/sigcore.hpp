#pragma once

#include <cstdint>
#include <vector>

#include "bridgesim/spectral.hpp"
#include "bridgesim/types.hpp"

namespace bridgesim {

// One period (2^order bits) of a binary de Bruijn sequence B(2, order),
// built with the greedy prefer-one construction; the seed rotates the
// sequence so different seeds give different (still valid) phases.
// order must be in [1, 20].
BitStream generate_de_bruijn(int order, std::uint64_t seed);

// Gray mapping, most significant bit first; size must be a multiple of
// bits_per_symbol. Works for any constellation built by this project
// (qam16, qpsk); the name keeps the primary use visible.
SymbolStream map_qam16(const BitStream& bits, const Constellation& c);

// hard-decision demapper, inverse of map_qam16 at high SNR
BitStream demap_nearest(const SymbolStream& symbols, const Constellation& c);

// Root-raised-cosine taps, unit energy, length span_symbols * sps + 1.
// The t = 0 and t = +-Ts/(4 beta) singularities use the analytic limits.
// rolloff in (0, 1], sps >= 2, span_symbols >= 8 and even.
std::vector<double> rrc_taps(double rolloff, int sps, int span_symbols);

// Linear-convolution pulse shaping: upsample by sps (zero stuffing) and
// filter. A single unit symbol reproduces the taps. Output length is
// n_symbols * sps + taps - 1; group delay (taps-1)/2 samples.
ComplexFrame shape(const SymbolStream& symbols, const std::vector<double>& taps,
                   int sps, double symbol_rate);

// Circular pulse shaping for periodic payloads: output length is exactly
// n_symbols * sps and the convolution wraps, so an integer number of
// payload cycles produces a frame with no edge transients. Requires
// n_symbols * sps >= taps.
ComplexFrame shape_periodic(const SymbolStream& symbols,
                            const std::vector<double>& taps, int sps,
                            double symbol_rate);

// Periodogram with circular moving-average smoothing (odd width, 1 = none).
// Satisfies Parseval: sum(density) * bin_hz == frame power.
Psd power_spectrum(const ComplexFrame& frame, int smoothing_bins = 1);

}  // namespace bridgesim
