#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bridgesim/types.hpp"

namespace bridgesim {

inline constexpr double hd_fec_limit = 3.8e-3;

struct SnrRecord {
  double snr_db = 0.0;
  double evm_percent = 0.0;
  std::size_t n_symbols = 0;
};

// Error-vector SNR: E[|X|^2] / E[|Y - X|^2] against the known transmitted
// symbols. Zero deviation reports snr_db = +inf, evm_percent = 0.
SnrRecord snr_estimate(const std::vector<cplx>& tx, const std::vector<cplx>& rx);

struct FmNoisePsd {
  std::vector<double> freq_hz;  // one-sided grid, DC excluded
  std::vector<double> values;   // smoothed instantaneous-frequency PSD, Hz^2/Hz
  int smoothing_taps = 31;
  double white_floor = 0.0;  // mean of the smoothed PSD over the white region
  double linewidth = 0.0;    // Hz, pi * white_floor
};

// FM-noise spectrum of a carrier-only frame: one-sided periodogram of the
// instantaneous frequency nu[n] = wrapped-phase-difference * fs / (2 pi),
// smoothed with a sliding average. The Lorentzian linewidth is pi times the
// white floor, fitted over [white_min_hz, white_max_hz]; white_max_hz = 0
// defaults to fs/20, below which the finite-difference droop is negligible.
FmNoisePsd fm_noise_spectrum(const ComplexFrame& tone, int smoothing_taps = 31,
                             double white_min_hz = 10e6,
                             double white_max_hz = 0.0);

// Hard-decision FEC verdict, strict: pass iff ber < 3.8e-3.
bool fec_verdict(double ber);

// BER curve over a dB abscissa (squared photocurrent in dB, or SNR in dB).
struct BerCurve {
  std::vector<double> x_db;
  std::vector<double> ber;
};

// Abscissa at which the curve first crosses target_ber from above, with
// interpolation linear in (dB, log10 BER). Empty if it never crosses.
std::optional<double> crossing_db(const BerCurve& curve, double target_ber);

// penalty of a relative to b: crossing_db(a) - crossing_db(b). Positive
// means a needs more power/SNR to reach the target. Empty if either curve
// never crosses.
std::optional<double> penalty_db(const BerCurve& a, const BerCurve& b,
                                 double target_ber);

// Wilson score interval (95% by default) for an observed error ratio.
std::pair<double, double> wilson_interval(std::uint64_t errors,
                                          std::uint64_t bits, double z = 1.96);

}  // namespace bridgesim
