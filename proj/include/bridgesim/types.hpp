#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bridgesim/util.hpp"

namespace bridgesim {

// Bits are stored one per byte with values 0/1. origin tags where a stream
// came from (payload construction, demapper) for diagnostics only.
struct BitStream {
  std::vector<std::uint8_t> bits;
  std::string origin;

  std::size_t size() const { return bits.size(); }
};

// Unit-average-energy constellation with Gray labels. points is indexed by
// label, so points[label(bits)] is the transmitted symbol.
struct Constellation {
  std::string name;
  int bits_per_symbol = 0;
  std::vector<cplx> points;
  std::vector<double> radii;  // distinct ring radii, ascending

  static const Constellation& qam16();
  static const Constellation& qpsk();

  // hard decision, returns the label of the nearest point
  int decide(const cplx& s) const;
  double nearest_radius(double r) const;
};

struct SymbolStream {
  std::vector<cplx> symbols;
  int bits_per_symbol = 0;
  BitStream source_bits;  // empty for receiver-side streams

  std::size_t size() const { return symbols.size(); }
};

// Complex baseband frame. center_offset is the absolute frequency that the
// frame's relative zero corresponds to; stages that care about absolute
// placement (IF response, low-frequency noise floor) evaluate their
// responses at relative frequency + center_offset.
struct ComplexFrame {
  std::vector<cplx> samples;
  double sample_rate = 0.0;    // Sa/s
  double center_offset = 0.0;  // Hz

  std::size_t size() const { return samples.size(); }
  double duration() const {
    return sample_rate > 0.0 ? static_cast<double>(samples.size()) / sample_rate
                             : 0.0;
  }
  double power() const { return mean_power(samples); }
};

// Two-sided spectrum on an ascending (fftshifted) frequency grid. density
// is linear power per Hz, so sum(density) * bin_hz equals the frame power.
struct Psd {
  std::vector<double> freq_hz;
  std::vector<double> density;
  double bin_hz = 0.0;

  double db(std::size_t i) const { return lin_to_db(density[i]); }
  // integrated power over [f_lo, f_hi], inclusive of bins whose center falls
  // inside the interval
  double band_power(double f_lo, double f_hi) const;
};

}  // namespace bridgesim
