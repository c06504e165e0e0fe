#include "bridgesim/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "bridgesim/fft.hpp"

namespace bridgesim {

double bin_freq(std::size_t k, std::size_t n, double fs) {
  // natural DFT order: bins [0, n/2) positive, [n/2, n) negative
  double f = static_cast<double>(k) * fs / static_cast<double>(n);
  if (k >= (n + 1) / 2) f -= fs;
  return f;
}

void freq_shift_inplace(ComplexFrame& frame, double df) {
  if (df == 0.0) return;
  check(frame.sample_rate > 0.0, "freq_shift: frame has no sample rate");
  const double w = 2.0 * pi * df / frame.sample_rate;
  // rotator recurrence, re-seeded with exact trig every 256 samples so
  // rounding error stays below ~1e-13 over arbitrarily long frames
  cplx rot(1.0, 0.0);
  const cplx step(std::cos(w), std::sin(w));
  for (std::size_t n = 0; n < frame.samples.size(); ++n) {
    if ((n & 0xFF) == 0) {
      const double ph = w * static_cast<double>(n);
      rot = cplx(std::cos(ph), std::sin(ph));
    }
    frame.samples[n] *= rot;
    rot *= step;
  }
}

ComplexFrame freq_shift(const ComplexFrame& frame, double df) {
  ComplexFrame out = frame;
  freq_shift_inplace(out, df);
  return out;
}

ComplexFrame bin_shift(const ComplexFrame& frame, long bins) {
  if (bins == 0) return frame;
  const long n = static_cast<long>(frame.size());
  std::vector<cplx> spec = fft(frame.samples);
  std::vector<cplx> rolled(frame.size());
  for (long k = 0; k < n; ++k) {
    long src = ((k - bins) % n + n) % n;
    rolled[k] = spec[src];
  }
  ComplexFrame out = frame;
  out.samples = ifft(rolled);
  return out;
}

double snap_to_bin(double f, std::size_t n, double fs) {
  const double df = fs / static_cast<double>(n);
  return std::round(f / df) * df;
}

ComplexFrame apply_response(const ComplexFrame& frame,
                            const std::function<cplx(double)>& h_abs) {
  check(frame.sample_rate > 0.0, "apply_response: frame has no sample rate");
  std::vector<cplx> spec = fft(frame.samples);
  const std::size_t n = spec.size();
  for (std::size_t k = 0; k < n; ++k) {
    spec[k] *= h_abs(bin_freq(k, n, frame.sample_rate) + frame.center_offset);
  }
  ComplexFrame out = frame;
  out.samples = ifft(spec);
  return out;
}

ComplexFrame band_select(const ComplexFrame& frame, double bw,
                         FilterShape shape) {
  check(bw > 0.0, "band_select: bandwidth must be positive");
  std::vector<cplx> spec = fft(frame.samples);
  const std::size_t n = spec.size();
  if (shape == FilterShape::brickwall) {
    const double half = bw / 2.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (std::abs(bin_freq(k, n, frame.sample_rate)) > half) spec[k] = 0.0;
    }
  } else {
    // |H(f)|^2 = exp(-f^2 / sigma^2) with the 3 dB point at bw/2
    const double sigma = (bw / 2.0) / std::sqrt(std::log(2.0));
    for (std::size_t k = 0; k < n; ++k) {
      const double f = bin_freq(k, n, frame.sample_rate);
      spec[k] *= std::exp(-0.5 * (f / sigma) * (f / sigma));
    }
  }
  ComplexFrame out = frame;
  out.samples = ifft(spec);
  return out;
}

ComplexFrame circular_filter(const ComplexFrame& frame,
                             const std::vector<double>& taps) {
  check(!taps.empty(), "circular_filter: empty taps");
  check(frame.size() >= taps.size(),
        "circular_filter: frame shorter than the filter");
  std::vector<cplx> h(frame.size(), cplx(0.0, 0.0));
  for (std::size_t t = 0; t < taps.size(); ++t) h[t] = taps[t];
  std::vector<cplx> spec = fft(frame.samples);
  const std::vector<cplx> hspec = fft(h);
  for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= hspec[k];
  ComplexFrame out = frame;
  out.samples = ifft(spec);
  return out;
}

ComplexFrame resample(const ComplexFrame& frame, double new_rate) {
  check(new_rate > 0.0, "resample: rate must be positive");
  const std::size_t n = frame.size();
  const double exact = static_cast<double>(n) * new_rate / frame.sample_rate;
  const std::size_t m = static_cast<std::size_t>(std::llround(exact));
  check(std::abs(exact - static_cast<double>(m)) < 1e-6,
        "resample: output length is not an integer for this rate");
  check(m >= 2, "resample: output too short");
  if (m == n) return frame;

  std::vector<cplx> spec = fft(frame.samples);
  std::vector<cplx> out_spec(m, cplx(0.0, 0.0));
  const std::size_t keep = std::min(n, m) / 2;
  for (std::size_t k = 0; k < keep; ++k) out_spec[k] = spec[k];
  for (std::size_t k = 1; k <= keep; ++k) out_spec[m - k] = spec[n - k];
  const double scale = static_cast<double>(m) / static_cast<double>(n);
  for (auto& v : out_spec) v *= scale;

  ComplexFrame out;
  out.samples = ifft(out_spec);
  out.sample_rate = new_rate;
  out.center_offset = frame.center_offset;
  return out;
}

long strongest_bin(const ComplexFrame& frame, double search_hz) {
  check(search_hz > 0.0, "strongest_bin: search window must be positive");
  std::vector<cplx> spec = fft(frame.samples);
  const std::size_t n = spec.size();
  long best = 0;
  double best_mag = -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double f = bin_freq(k, n, frame.sample_rate);
    if (std::abs(f) > search_hz) continue;
    const double mag = std::norm(spec[k]);
    if (mag > best_mag) {
      best_mag = mag;
      best = static_cast<long>(k < (n + 1) / 2 ? k : k - n);
    }
  }
  return best;
}

}  // namespace bridgesim
