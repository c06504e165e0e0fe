#pragma once

#include <cstdint>
#include <vector>

#include "bridgesim/types.hpp"

namespace bridgesim {

// Aggregate laser line: every free-running laser in the link is lumped into
// one Wiener phase-noise process with the measured total linewidth, plus the
// net carrier frequency offset. Pilot and signal ride the same path, so a
// per-laser decomposition would change nothing downstream.
struct LaserSpec {
  double lorentzian_linewidth = 0.0;  // Hz, aggregate
  double freq_offset = 0.0;           // Hz
  std::uint64_t seed = 1;
};

// Receiver IF chain: a first-order high-pass models the roll-off near DC,
// a second-order Butterworth low-pass the final-amplifier bandwidth. Both
// are evaluated at absolute frequency (see ComplexFrame::center_offset).
struct IfResponse {
  double low_cut = 0.3e9;           // Hz, high-pass corner
  double high_cut = 14e9;           // Hz, low-pass corner
  double passband_ripple_db = 5.0;  // documented in-band variation bound
};

// Photocurrent-to-SNR bookkeeping: received THz power scales as the square
// of the photodiode current, so SNR moves 20 dB per current decade from a
// calibrated reference point.
struct PowerModel {
  double photocurrent = 2.15e-3;      // A
  double ref_photocurrent = 2.15e-3;  // A
  double snr_at_ref = 20.0;           // dB, in-band SNR at the reference
  double saturation_current = 3e-3;   // A, onset of receiver compression
};

// Multiplies by e^{j phi[n]}, phi a Wiener process with per-sample increment
// variance 2 pi linewidth / fs, pinned so the trajectory returns to its
// start (the frame stays one period of a periodic process; only the DC bin
// of the frequency-noise spectrum moves). Optionally records phi for
// diagnostics. Sample magnitudes are preserved exactly.
ComplexFrame apply_phase_noise(const ComplexFrame& frame, const LaserSpec& laser,
                               std::vector<double>* trajectory = nullptr);

// Multiplies by e^{j 2 pi offset t}; |offset| must be below Nyquist. The
// offset is quantized to the frame's spectral grid (at most half a bin) so
// the shifted frame stays periodic; applied_hz reports the quantized value.
ComplexFrame apply_freq_offset(const ComplexFrame& frame, double offset_hz,
                               double* applied_hz = nullptr);

// Adds white complex Gaussian noise so the SNR measured against the noise
// power falling inside signal_band_hz equals target_snr_db. +inf is the
// noise-off flag and returns the frame unchanged.
ComplexFrame apply_awgn(const ComplexFrame& frame, double target_snr_db,
                        double signal_band_hz, std::uint64_t seed);

double photocurrent_to_snr(const PowerModel& model);

ComplexFrame apply_if_response(const ComplexFrame& frame, const IfResponse& resp);

// Rapp-style memoryless envelope compression:
//   out = x / (1 + (|x|^2 / p_sat)^knee)^(1 / (2 knee))
// Phase is preserved exactly; small-signal gain is 1.
ComplexFrame apply_saturation(const ComplexFrame& frame, double sat_input_power,
                              double knee);

// Additive noise with a first-order low-pass power profile over absolute
// frequency (corner corner_hz), scaled so the total added power sits
// rel_power_db below the frame power. Models the receiver's low-frequency
// electrical noise floor; the low-IF channel of a twin-sideband signal
// absorbs most of it.
ComplexFrame apply_lowfreq_noise(const ComplexFrame& frame, double rel_power_db,
                                 double corner_hz, std::uint64_t seed);

// Gain of a circular-aperture lens antenna: 10 log10(4 pi A / lambda^2).
double antenna_gain_db(double lens_diameter_m, double carrier_freq_hz);

// Smooth carrier-band roll-off used by the multi-channel sweep: flat up to
// 224 GHz, then -0.045 dB/GHz, floored at -6 dB. Stands in for the measured
// transmitter/receiver response over the scanned band.
double wdm_response_db(double carrier_freq_hz);

}  // namespace bridgesim
