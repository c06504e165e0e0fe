#pragma once

#include <cstdint>
#include <vector>

#include "bridgesim/sigcore.hpp"
#include "bridgesim/types.hpp"

namespace bridgesim {

// Single-sideband frame with a residual-carrier pilot: pilot tone at
// relative frequency 0, RRC-shaped data sideband centered on
// upconversion_hz. The pilot is a complex constant; the data sideband is
// rotated by bias_phase relative to it (the transmitter bias point sets a
// fixed phase between carrier leak and signal, which the receiver's
// fixed-offset stage has to remove). pilot amplitude follows ptspr_db,
// the pilot-to-signal power ratio.
struct SsbConfig {
  double baud_hz = 5e9;
  double rolloff = 0.1;
  int sps = 10;
  int span_symbols = 32;            // RRC span
  double upconversion_hz = 3.25e9;  // snapped to the frame DFT grid
  double ptspr_db = -11.0;
  bool pilot_enabled = true;
  double bias_phase_rad = pi / 6.0;

  double signal_bandwidth() const { return (1.0 + rolloff) * baud_hz; }
  double guard_band() const { return upconversion_hz - signal_bandwidth() / 2.0; }
  double sample_rate() const { return baud_hz * sps; }
};

// what the transmitter actually realized (after grid snapping)
struct SsbFrameInfo {
  double carrier_hz = 0.0;      // bin-snapped upconversion frequency
  double pilot_amplitude = 0.0;
  double signal_power = 0.0;    // mean power of the shaped data component
};

ComplexFrame make_ssb_with_pilot(const SymbolStream& symbols,
                                 const SsbConfig& cfg,
                                 SsbFrameInfo* info = nullptr);

// Twin-SSB: two independent channels on mirror sidebands around one shared
// pilot at relative 0. ch1 occupies the negative band (lower IF after
// downconversion), ch2 the positive band. PTSPR is pilot power over the
// total two-channel data power; the pilot amplitude is computed from the
// nominal (both channels active, unit-energy symbols) power so the builder
// is linear in the channel inputs.
struct TwinSsbConfig {
  double baud_hz = 5e9;
  double rolloff = 0.1;
  int sps = 10;
  int span_symbols = 32;
  double upconversion_hz = 2.875e9;
  double ptspr_db = -11.0;
  bool pilot_enabled = true;
  double bias_phase_rad = pi / 6.0;

  double signal_bandwidth() const { return (1.0 + rolloff) * baud_hz; }
  double guard_band() const { return upconversion_hz - signal_bandwidth() / 2.0; }
  double total_span() const { return 2.0 * upconversion_hz + signal_bandwidth(); }
  double sample_rate() const { return baud_hz * sps; }
};

// Either channel may be empty (silent); sizes must match otherwise.
ComplexFrame make_twin_ssb(const SymbolStream& ch1, const SymbolStream& ch2,
                           const TwinSsbConfig& cfg, SsbFrameInfo* info = nullptr);

// Comb/WDM channel grid. anchor_index places the anchor within the grid
// (the measured grid has one channel below the anchor and three above);
// it is clamped to the channel count.
struct WdmGrid {
  double anchor_hz = 241.57e9;
  double spacing_hz = 17.4e9;
  int count = 5;
  int anchor_index = 1;
};

std::vector<double> wdm_channel_freqs(const WdmGrid& grid);

// Circular fractional delay by delay_symbols at the given symbol rate
// (band-limited, implemented as a spectral phase ramp). Emulates the odd
// and even branch length mismatch of the decorrelation unit.
ComplexFrame apply_decorrelation_delay(const ComplexFrame& frame,
                                       double delay_symbols, double baud_hz);

// Standard payload: four de Bruijn periods of the given order concatenated,
// Gray-mapped, and the whole thing repeated `periods` times so circular
// shaping is exact. seed decorrelates the de Bruijn phases.
SymbolStream build_payload(int order, int periods, std::uint64_t seed,
                           const Constellation& c);

}  // namespace bridgesim
