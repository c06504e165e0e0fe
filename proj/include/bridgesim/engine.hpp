#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bridgesim/scenario.hpp"
#include "bridgesim/types.hpp"

namespace bridgesim {

// Per-point outcome. Operational failures are recorded, not thrown, so a
// sweep always yields one row per axis value.
enum class PointStatus { ok, sync_failed, foe_failed, vv_failed, eq_diverged };

std::string to_string(PointStatus s);
PointStatus point_status_from_string(const std::string& s);

struct PointResult {
  double axis_value = 0.0;  // display units: mA, dB, or GHz; 0 for single runs
  std::uint64_t seed = 0;   // derived point seed actually used
  PointStatus status = PointStatus::ok;
  double ber = 0.5;
  std::uint64_t errors = 0;
  std::uint64_t bits = 0;
  double snr_db = 0.0;        // post-DSP error-vector SNR
  double evm_percent = 0.0;
  double wilson_lo = 0.0;     // 95% interval on the error ratio
  double wilson_hi = 0.5;
  double ber_ch1 = -1.0;      // twin-sideband per-channel BER; -1 when n/a
  double ber_ch2 = -1.0;
  double phase_error_std = -1.0;  // rad, recovered-tone phase error; -1 when n/a
  double snr_target_db = 0.0;     // per-channel data Es/N0 handed to the noise stage
  bool exploratory = false;       // fewer than 1e5 counted bits
};

struct SweepResult {
  std::string scenario_name;
  std::string axis;  // empty for a single-point run
  std::uint64_t config_hash = 0;
  std::uint64_t master_seed = 0;
  std::vector<PointResult> points;  // sorted by axis_value
};

// One run at the scenario's own operating point (any sweep_* fields ignored).
SweepResult run_scenario(const LinkScenario& sc, std::uint64_t master_seed);

// Sweep the given axis. Results are bit-identical for any thread count:
// every point derives its own RNG streams from (master_seed, point index)
// and the shared transmit frame is read-only. Needs >= 2 axis values;
// an empty sweep falls back to run_scenario.
SweepResult run_sweep(const LinkScenario& sc, const SweepSpec& sweep,
                      std::uint64_t master_seed, int threads = 1);

}  // namespace bridgesim
