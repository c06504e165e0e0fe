#include "bridgesim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bridgesim/fft.hpp"

namespace bridgesim {

SnrRecord snr_estimate(const std::vector<cplx>& tx, const std::vector<cplx>& rx) {
  check(tx.size() == rx.size(), "snr estimate: streams must be aligned");
  check(!tx.empty(), "snr estimate: empty streams");
  double sig = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i < tx.size(); ++i) {
    sig += std::norm(tx[i]);
    err += std::norm(rx[i] - tx[i]);
  }
  check(sig > 0.0, "snr estimate: reference has no energy");
  SnrRecord rec;
  rec.n_symbols = tx.size();
  if (err == 0.0) {
    rec.snr_db = std::numeric_limits<double>::infinity();
    rec.evm_percent = 0.0;
    return rec;
  }
  const double evm = std::sqrt(err / sig);
  rec.evm_percent = 100.0 * evm;
  rec.snr_db = -20.0 * std::log10(evm);
  return rec;
}

FmNoisePsd fm_noise_spectrum(const ComplexFrame& tone, int smoothing_taps,
                             double white_min_hz, double white_max_hz) {
  check(smoothing_taps >= 1 && smoothing_taps % 2 == 1,
        "fm noise spectrum: smoothing_taps must be odd and >= 1");
  check(tone.sample_rate > 0.0, "fm noise spectrum: frame has no sample rate");
  check(tone.duration() >= 1e-6, "fm noise spectrum: need at least 1 us of tone");
  const double fs = tone.sample_rate;
  if (white_max_hz <= 0.0) white_max_hz = fs / 20.0;
  check(white_min_hz < white_max_hz,
        "fm noise spectrum: empty white region");

  // instantaneous frequency from wrapped phase differences
  const std::size_t m = tone.size() - 1;
  std::vector<cplx> nu(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double dphi = std::arg(tone.samples[i + 1] * std::conj(tone.samples[i]));
    if (std::abs(dphi) > 0.95 * pi)
      throw config_error(
          "fm noise spectrum: phase increments approach pi; sample rate too "
          "coarse to unwrap");
    nu[i] = dphi * fs / (2.0 * pi);
  }

  // one-sided periodogram, DC excluded
  nu = fft(nu);
  const std::size_t half = m / 2;
  FmNoisePsd psd;
  psd.smoothing_taps = smoothing_taps;
  psd.freq_hz.resize(half - 1);
  std::vector<double> raw(half - 1);
  for (std::size_t k = 1; k < half; ++k) {
    psd.freq_hz[k - 1] = static_cast<double>(k) * fs / static_cast<double>(m);
    raw[k - 1] = 2.0 * std::norm(nu[k]) / (static_cast<double>(m) * fs);
  }

  // sliding average, window truncated at the ends
  const std::size_t n = raw.size();
  const long r = smoothing_taps / 2;
  psd.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long lo = std::max<long>(0, static_cast<long>(i) - r);
    const long hi = std::min<long>(static_cast<long>(n) - 1,
                                   static_cast<long>(i) + r);
    double acc = 0.0;
    for (long j = lo; j <= hi; ++j) acc += raw[static_cast<std::size_t>(j)];
    psd.values[i] = acc / static_cast<double>(hi - lo + 1);
  }

  double floor_acc = 0.0;
  std::size_t floor_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (psd.freq_hz[i] >= white_min_hz && psd.freq_hz[i] <= white_max_hz) {
      floor_acc += psd.values[i];
      ++floor_count;
    }
  }
  check(floor_count > 0, "fm noise spectrum: white region holds no bins");
  psd.white_floor = floor_acc / static_cast<double>(floor_count);
  psd.linewidth = pi * psd.white_floor;
  return psd;
}

bool fec_verdict(double ber) {
  check(ber >= 0.0 && ber <= 0.5, "fec verdict: ber out of range");
  return ber < hd_fec_limit;
}

std::optional<double> crossing_db(const BerCurve& curve, double target_ber) {
  check(curve.x_db.size() == curve.ber.size(), "ber curve: ragged arrays");
  check(target_ber > 0.0, "ber curve: target must be positive");
  const std::size_t n = curve.x_db.size();
  // log-domain interpolation; zero-BER points are clamped to a tiny floor
  const auto lg = [](double b) { return std::log10(std::max(b, 1e-12)); };
  const double lt = lg(target_ber);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = lg(curve.ber[i]);
    const double b = lg(curve.ber[i + 1]);
    if (a >= lt && b < lt) {
      if (a == b) return curve.x_db[i];
      const double t = (lt - a) / (b - a);
      return curve.x_db[i] + t * (curve.x_db[i + 1] - curve.x_db[i]);
    }
  }
  return std::nullopt;
}

std::optional<double> penalty_db(const BerCurve& a, const BerCurve& b,
                                 double target_ber) {
  const auto xa = crossing_db(a, target_ber);
  const auto xb = crossing_db(b, target_ber);
  if (!xa || !xb) return std::nullopt;
  return *xa - *xb;
}

std::pair<double, double> wilson_interval(std::uint64_t errors,
                                          std::uint64_t bits, double z) {
  check(bits > 0, "wilson interval: no bits");
  check(errors <= bits, "wilson interval: more errors than bits");
  const double n = static_cast<double>(bits);
  const double p = static_cast<double>(errors) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double spread =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - spread), std::min(1.0, center + spread)};
}

}  // namespace bridgesim
