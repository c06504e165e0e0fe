#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bridgesim/spectral.hpp"
#include "bridgesim/types.hpp"

namespace bridgesim {

// Operational failures (lost sync, no FOE peak, diverged equalizer) are
// reported through status fields / empty optionals so sweep points can
// record them; only configuration mistakes throw.

struct PilotFilterCfg {
  double bandwidth = 200e6;  // Hz, two-sided, around relative frequency 0
  FilterShape shape = FilterShape::brickwall;
};

// Band-pass the tone around relative frequency 0 and discard its envelope
// (unit normalization), keeping only the phase/frequency trajectory. The
// filter must fit strictly inside the pilot-to-sideband guard band.
ComplexFrame extract_pilot(const ComplexFrame& frame, const PilotFilterCfg& cfg,
                           double guard_band);

// y[n] = frame[n] * conj(tone[n] / |tone[n]|) * e^{-j 2 pi f_c n / fs}.
// Any phase trajectory common to signal and tone cancels exactly, so this
// one step performs frequency-offset and phase-noise compensation jointly.
ComplexFrame pilot_downconvert(const ComplexFrame& frame,
                               const ComplexFrame& tone, double f_c);

// Fourth-power FFT frequency-offset estimator with parabolic interpolation
// around the spectral peak. Valid for |offset| < baud/8; larger offsets
// alias back into that window and come out wrong (undetectably, so staying
// in range is the caller's contract). Returns nothing when no dominant
// line exists (peak below 16 dB over the median).
std::optional<double> fft_foe(const std::vector<cplx>& symbols, double baud);

struct BpsCfg {
  int test_phases = 32;   // >= 4, divisible by 4
  int block_length = 64;  // symbols, >= 8
};

struct BpsResult {
  std::vector<double> phase;  // recovered carrier phase per symbol
  std::vector<cplx> symbols;  // input derotated by that phase
};

// Blind phase search: per block, the best of test_phases candidate phases in
// [0, pi/2) by summed squared decision distance; unwrapped across blocks.
// The leftover global pi/2 quadrant is resolved against a known preamble
// occupying input indices [preamble_pos, preamble_pos + preamble.size()).
BpsResult bps_recover(const std::vector<cplx>& symbols, const BpsCfg& cfg,
                      const Constellation& c, const std::vector<cplx>& preamble,
                      std::size_t preamble_pos);

// Rotation-only Viterbi-Viterbi for a fixed offset in (-pi/4, pi/4):
// fourth-power average over the Class-I symbols (inner and outer rings,
// whose ideal phases are pi/4-congruent). Empty if fewer than 100 Class-I
// symbols survive the ring selection.
std::optional<double> vv_fixed_offset(const std::vector<cplx>& symbols,
                                      const Constellation& c);

struct EqualizerCfg {
  int taps = 21;  // odd
  double step_rde = 1e-3;
  double step_dd = 5e-4;
  int training_symbols = 0;        // data-aided startup when a reference is given
  double switch_threshold = 1e-4;  // per-update tap change that ends the RDE stage
  int max_epochs = 4;              // adaptation passes over the frame
};

enum class EqStatus { converged, max_epochs_reached, diverged };

struct EqResult {
  std::vector<cplx> symbols;  // frozen-tap refilter output, one per symbol
  EqStatus status = EqStatus::converged;
  std::vector<cplx> taps;
};

// T/2-spaced adaptive equalizer, offline pattern: adapt over the (periodic)
// frame, freeze, refilter from the start so no convergence transient leaks
// into the output. Stage 1 is radius-directed (phase-blind); once the
// per-update tap change drops below switch_threshold it hands over to
// decision-directed LMS, unless rde_only is set. Input must be 2 samples
// per symbol; the input is normalized to unit mean sample power internally.
EqResult equalize(const std::vector<cplx>& x2, const EqualizerCfg& cfg,
                  const Constellation& c,
                  const std::vector<cplx>* training = nullptr,
                  bool rde_only = false);

enum class SyncStatus { ok, sync_failed };

struct BerRecord {
  SyncStatus status = SyncStatus::sync_failed;
  double ber = 0.5;
  std::uint64_t errors = 0;
  std::uint64_t bits = 0;
  double corr_peak = 0.0;  // normalized coherent correlation at the chosen lag
  std::size_t delay = 0;   // symbols, rx[j] lines up with ref[(j - delay) mod P]
  double rotation = 0.0;   // global pi/2 multiple removed before counting
  double wilson_lo = 0.0;  // 95% confidence interval on the error ratio
  double wilson_hi = 0.5;
};

// Rotation-invariant coarse alignment: circular correlation of mean-removed
// |s|^2 profiles, folded over the reference period. Returns delay d so that
// rx[j] corresponds to ref[(j - d) mod P].
std::size_t coarse_align(const std::vector<cplx>& rx,
                         const std::vector<cplx>& ref_period);

// Fold the received symbols over the reference period, find the circular
// lag by the complex cross-correlation magnitude, resolve the global pi/2
// quadrant from the peak's phase (known-sequence alignment), then demap and
// count bit errors over every received symbol after removing that rotation
// and the reference-fitted complex gain (blind equalizers park the modulus
// on the ring radii with the noise included, so the signal itself arrives
// slightly shrunk; slicing at the fitted scale removes that bias).
// A normalized correlation peak below 0.5 (noise floor, or a mid-frame
// quadrant slip splitting the fold) reports sync failure.
BerRecord sync_and_count(const std::vector<cplx>& rx, const SymbolStream& ref_period,
                         const Constellation& c);

}  // namespace bridgesim
