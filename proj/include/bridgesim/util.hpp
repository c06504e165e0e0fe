#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace bridgesim {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }

// Configuration and precondition violations throw. Operational failures
// (sync loss, estimator breakdown, equalizer divergence) are reported
// through result status fields instead so a sweep can record them per point.
class config_error : public std::invalid_argument {
 public:
  explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

inline void check(bool cond, const std::string& msg) {
  if (!cond) throw config_error(msg);
}

inline double mean_power(const std::vector<cplx>& v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& s : v) acc += std::norm(s);
  return acc / static_cast<double>(v.size());
}

// wrap to (-pi, pi]
inline double wrap_phase(double x) {
  x = std::fmod(x, 2.0 * pi);
  if (x > pi) x -= 2.0 * pi;
  if (x <= -pi) x += 2.0 * pi;
  return x;
}

}  // namespace bridgesim
