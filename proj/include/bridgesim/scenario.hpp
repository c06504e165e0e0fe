#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bridgesim/util.hpp"

namespace bridgesim {

// One link configuration: waveform, laser, ordered impairment list, receiver
// settings, sweep defaults. Serialized as a flat `key = value` text file
// (schema below); parse/serialize round-trip exactly, and the canonical
// serialization feeds the config hash.
struct LinkScenario {
  int schema_version = 1;
  std::string name;
  std::string format = "qam16";
  std::string waveform = "ssb";  // ssb | twin-ssb

  double baud = 5e9;
  double rolloff = 0.1;
  int sps = 10;
  int span_symbols = 32;
  double upconversion = 3.25e9;  // Hz
  double ptspr_db = -11.0;
  double bias_phase = pi / 6.0;  // rad, data rotation relative to the pilot
  int payload_order = 11;        // de Bruijn order; one period = 2^order symbols
  int payload_periods = 24;

  double linewidth = 0.0;    // Hz, aggregate
  double freq_offset = 0.0;  // Hz

  // applied in list order; tokens: phase-noise, offset, saturation,
  // if-response, awgn, low-freq-noise
  std::vector<std::string> impairments;

  double photocurrent = 2.15e-3;      // A
  double ref_photocurrent = 2.15e-3;  // A
  double snr_at_ref = 20.0;           // dB, whole-frame in-band SNR at the reference
  double saturation_current = 3e-3;   // A
  double sat_knee = 2.0;

  double if_low_cut = 0.3e9;  // Hz
  double if_high_cut = 14e9;  // Hz
  double if_center = 7e9;     // Hz, absolute frequency of the frame's relative 0

  double lf_rel_db = -18.0;  // low-frequency noise power relative to signal
  double lf_corner = 2e9;    // Hz

  double wdm_anchor = 241.57e9;   // Hz
  double wdm_spacing = 17.4e9;    // Hz
  int wdm_count = 5;
  int wdm_anchor_index = 1;
  int wdm_decorr_symbols = 90;    // applied to even sweep channels
  double channel_freq = 241.57e9; // Hz, carrier for single-channel runs

  std::string recovery = "pilot";  // pilot | bps
  double pilot_bw = 200e6;         // Hz, two-sided
  std::string pilot_shape = "brickwall";  // brickwall | gaussian
  int bps_test_phases = 32;
  int bps_block = 64;

  int eq_taps = 21;
  double eq_step_rde = 1e-3;
  double eq_step_dd = 5e-4;
  int eq_max_epochs = 4;

  std::uint64_t seed = 1;

  // default sweep; empty axis means a single-point run
  std::string sweep_axis;  // photocurrent | ptspr_db | channel_freq
  double sweep_start = 0.0;
  double sweep_stop = 0.0;
  double sweep_step = 0.0;

  std::size_t period_symbols() const {
    return static_cast<std::size_t>(1) << payload_order;
  }
  std::size_t frame_symbols() const {
    return period_symbols() * static_cast<std::size_t>(payload_periods);
  }
  double frame_duration() const {
    return static_cast<double>(frame_symbols()) / baud;
  }
  double signal_bandwidth() const { return (1.0 + rolloff) * baud; }
  double guard_band() const {
    return upconversion - signal_bandwidth() / 2.0;
  }
};

// Parse the flat key = value schema ('#' comments, blank lines allowed).
// Unknown keys are errors so typos cannot silently fall back to defaults.
LinkScenario parse_scenario(const std::string& text);
LinkScenario load_scenario(const std::string& path);

// Canonical serialization: every field, fixed order, %.17g numbers, so the
// text (and therefore the config hash) identifies the configuration exactly.
std::string serialize_scenario(const LinkScenario& sc);

// FNV-1a 64 over the canonical serialization.
std::uint64_t config_hash(const LinkScenario& sc);

// Throws config_error with a message naming the offending field.
void validate_scenario(const LinkScenario& sc);

// Sweep axis with expanded values. Units follow the display convention:
// photocurrent in mA, ptspr_db in dB, channel_freq in GHz.
struct SweepSpec {
  std::string axis;
  std::vector<double> values;
};

// "axis=start:stop:step", inclusive of both ends (within half a step).
SweepSpec parse_sweep_arg(const std::string& arg);

// Sweep spec from the scenario's own sweep_* fields; empty axis when the
// scenario does not define one.
SweepSpec default_sweep(const LinkScenario& sc);

}  // namespace bridgesim
