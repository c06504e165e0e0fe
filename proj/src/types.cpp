#include "bridgesim/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bridgesim {

namespace {

// 2-bit Gray code to 4-PAM level: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
// Adjacent levels differ in exactly one bit.
constexpr double gray_pam4[4] = {-3.0, -1.0, 3.0, 1.0};

Constellation build_qam16() {
  Constellation c;
  c.name = "qam16";
  c.bits_per_symbol = 4;
  c.points.resize(16);
  const double scale = 1.0 / std::sqrt(10.0);  // mean |a+jb|^2 over the grid is 10
  for (int label = 0; label < 16; ++label) {
    int gi = (label >> 2) & 3;
    int gq = label & 3;
    c.points[label] = cplx(gray_pam4[gi] * scale, gray_pam4[gq] * scale);
  }
  c.radii = {std::sqrt(2.0) * scale, std::sqrt(10.0) * scale,
             std::sqrt(18.0) * scale};
  return c;
}

Constellation build_qpsk() {
  Constellation c;
  c.name = "qpsk";
  c.bits_per_symbol = 2;
  const double a = 1.0 / std::sqrt(2.0);
  // Gray: 00 -> (+,+), 01 -> (+,-), 10 -> (-,+), 11 -> (-,-)
  c.points = {cplx(a, a), cplx(a, -a), cplx(-a, a), cplx(-a, -a)};
  c.radii = {1.0};
  return c;
}

// level slicer for the Gray 4-PAM axis above; thresholds at -2, 0, +2
inline int slice_pam4(double x) {
  if (x < 0.0) return x < -2.0 ? 0 : 1;
  return x > 2.0 ? 2 : 3;
}

}  // namespace

const Constellation& Constellation::qam16() {
  static const Constellation c = build_qam16();
  return c;
}

const Constellation& Constellation::qpsk() {
  static const Constellation c = build_qpsk();
  return c;
}

int Constellation::decide(const cplx& s) const {
  if (bits_per_symbol == 4) {
    const double k = std::sqrt(10.0);
    return (slice_pam4(s.real() * k) << 2) | slice_pam4(s.imag() * k);
  }
  int best = 0;
  double best_d = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < points.size(); ++i) {
    double d = std::norm(s - points[i]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

double Constellation::nearest_radius(double r) const {
  double best = radii.front();
  double best_d = std::abs(r - best);
  for (double cand : radii) {
    double d = std::abs(r - cand);
    if (d < best_d) {
      best_d = d;
      best = cand;
    }
  }
  return best;
}

double Psd::band_power(double f_lo, double f_hi) const {
  check(f_lo <= f_hi, "band_power: inverted band");
  double acc = 0.0;
  for (std::size_t i = 0; i < freq_hz.size(); ++i) {
    if (freq_hz[i] >= f_lo && freq_hz[i] <= f_hi) acc += density[i];
  }
  return acc * bin_hz;
}

}  // namespace bridgesim
