#include "bridgesim/sigcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bridgesim/fft.hpp"

namespace bridgesim {

BitStream generate_de_bruijn(int order, std::uint64_t seed) {
  check(order >= 1 && order <= 20, "generate_de_bruijn: order must be in [1, 20]");
  const std::size_t len = std::size_t(1) << order;
  const std::uint64_t mask = len - 1;

  // Greedy prefer-one (Martin's construction): start from the all-zero
  // word and append a 1 whenever the resulting word is new. The first
  // 2^order bits of the run form one cyclic period.
  std::vector<std::uint8_t> bits;
  bits.reserve(len);
  std::vector<bool> seen(len, false);
  std::uint64_t window = 0;
  for (int i = 0; i < order; ++i) bits.push_back(0);
  seen[0] = true;
  while (bits.size() < len + static_cast<std::size_t>(order)) {
    std::uint64_t cand1 = ((window << 1) | 1) & mask;
    std::uint64_t cand0 = (window << 1) & mask;
    if (!seen[cand1]) {
      bits.push_back(1);
      seen[cand1] = true;
      window = cand1;
    } else if (!seen[cand0]) {
      bits.push_back(0);
      seen[cand0] = true;
      window = cand0;
    } else {
      break;  // all words visited; remaining bits wrap around
    }
  }
  bits.resize(len);

  BitStream out;
  out.bits.resize(len);
  const std::size_t rot = static_cast<std::size_t>(seed & mask);
  for (std::size_t i = 0; i < len; ++i) out.bits[i] = bits[(i + rot) % len];
  out.origin = "de-bruijn-" + std::to_string(order);
  return out;
}

SymbolStream map_qam16(const BitStream& bits, const Constellation& c) {
  const int bps = c.bits_per_symbol;
  check(bps > 0, "map_qam16: constellation has no labels");
  check(bits.size() % static_cast<std::size_t>(bps) == 0,
        "map_qam16: bit count is not a multiple of bits per symbol");
  SymbolStream out;
  out.bits_per_symbol = bps;
  out.source_bits = bits;
  out.symbols.resize(bits.size() / static_cast<std::size_t>(bps));
  for (std::size_t s = 0; s < out.symbols.size(); ++s) {
    int label = 0;
    for (int b = 0; b < bps; ++b) {
      label = (label << 1) | bits.bits[s * static_cast<std::size_t>(bps) +
                                       static_cast<std::size_t>(b)];
    }
    out.symbols[s] = c.points[static_cast<std::size_t>(label)];
  }
  return out;
}

BitStream demap_nearest(const SymbolStream& symbols, const Constellation& c) {
  const int bps = c.bits_per_symbol;
  BitStream out;
  out.origin = "demap";
  out.bits.resize(symbols.size() * static_cast<std::size_t>(bps));
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    int label = c.decide(symbols.symbols[s]);
    for (int b = 0; b < bps; ++b) {
      out.bits[s * static_cast<std::size_t>(bps) + static_cast<std::size_t>(b)] =
          static_cast<std::uint8_t>((label >> (bps - 1 - b)) & 1);
    }
  }
  return out;
}

std::vector<double> rrc_taps(double rolloff, int sps, int span_symbols) {
  check(rolloff > 0.0 && rolloff <= 1.0, "rrc_taps: rolloff must be in (0, 1]");
  check(sps >= 2, "rrc_taps: sps must be >= 2");
  check(span_symbols >= 8 && span_symbols % 2 == 0,
        "rrc_taps: span must be even and >= 8 symbols");

  const int n = span_symbols * sps + 1;
  const int mid = span_symbols * sps / 2;
  const double b = rolloff;
  std::vector<double> h(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // t in symbol periods
    const double t = static_cast<double>(i - mid) / static_cast<double>(sps);
    double v;
    if (std::abs(t) < 1e-12) {
      v = 1.0 + b * (4.0 / pi - 1.0);
    } else if (std::abs(std::abs(t) - 1.0 / (4.0 * b)) < 1e-9) {
      v = (b / std::sqrt(2.0)) *
          ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * b)) +
           (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * b)));
    } else {
      const double num = std::sin(pi * t * (1.0 - b)) +
                         4.0 * b * t * std::cos(pi * t * (1.0 + b));
      const double den = pi * t * (1.0 - 16.0 * b * b * t * t);
      v = num / den;
    }
    h[static_cast<std::size_t>(i)] = v;
  }
  const double energy = std::inner_product(h.begin(), h.end(), h.begin(), 0.0);
  const double norm = 1.0 / std::sqrt(energy);
  for (auto& v : h) v *= norm;
  return h;
}

namespace {

void check_shape_args(const SymbolStream& symbols,
                      const std::vector<double>& taps, int sps,
                      double symbol_rate) {
  check(!symbols.symbols.empty(), "shape: empty symbol stream");
  check(!taps.empty(), "shape: empty taps");
  check(sps >= 2, "shape: sps must be >= 2");
  check(symbol_rate > 0.0, "shape: symbol rate must be positive");
}

}  // namespace

ComplexFrame shape(const SymbolStream& symbols, const std::vector<double>& taps,
                   int sps, double symbol_rate) {
  check_shape_args(symbols, taps, sps, symbol_rate);
  const std::size_t n_sym = symbols.size();
  const std::size_t n_out = n_sym * static_cast<std::size_t>(sps) + taps.size() - 1;
  ComplexFrame out;
  out.sample_rate = symbol_rate * sps;
  out.samples.assign(n_out, cplx(0.0, 0.0));
  // polyphase form: only every sps-th input sample is nonzero
  for (std::size_t k = 0; k < n_sym; ++k) {
    const cplx s = symbols.symbols[k];
    const std::size_t base = k * static_cast<std::size_t>(sps);
    for (std::size_t m = 0; m < taps.size(); ++m) {
      out.samples[base + m] += s * taps[m];
    }
  }
  return out;
}

ComplexFrame shape_periodic(const SymbolStream& symbols,
                            const std::vector<double>& taps, int sps,
                            double symbol_rate) {
  check_shape_args(symbols, taps, sps, symbol_rate);
  const std::size_t n_sym = symbols.size();
  const std::size_t n_out = n_sym * static_cast<std::size_t>(sps);
  check(n_out >= taps.size(),
        "shape_periodic: frame shorter than the shaping filter");
  ComplexFrame out;
  out.sample_rate = symbol_rate * sps;
  out.samples.assign(n_out, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < n_sym; ++k) {
    const cplx s = symbols.symbols[k];
    const std::size_t base = k * static_cast<std::size_t>(sps);
    for (std::size_t m = 0; m < taps.size(); ++m) {
      std::size_t idx = base + m;
      if (idx >= n_out) idx -= n_out;
      out.samples[idx] += s * taps[m];
    }
  }
  return out;
}

Psd power_spectrum(const ComplexFrame& frame, int smoothing_bins) {
  check(!frame.samples.empty(), "power_spectrum: empty frame");
  check(frame.sample_rate > 0.0, "power_spectrum: frame has no sample rate");
  check(smoothing_bins >= 1 && smoothing_bins % 2 == 1,
        "power_spectrum: smoothing width must be odd and >= 1");

  const std::size_t n = frame.size();
  const double fs = frame.sample_rate;
  std::vector<cplx> spec = fft(frame.samples);

  // periodogram, power per Hz: |X|^2 / (N * fs)
  std::vector<double> raw(n);
  const double scale = 1.0 / (static_cast<double>(n) * fs);
  for (std::size_t k = 0; k < n; ++k) raw[k] = std::norm(spec[k]) * scale;

  // circular moving average preserves the total (Parseval survives smoothing)
  std::vector<double> smooth(n);
  if (smoothing_bins == 1) {
    smooth = raw;
  } else {
    const long w = smoothing_bins / 2;
    const long ln = static_cast<long>(n);
    double acc = 0.0;
    for (long j = -w; j <= w; ++j) acc += raw[static_cast<std::size_t>((j + ln) % ln)];
    for (long k = 0; k < ln; ++k) {
      smooth[static_cast<std::size_t>(k)] = acc / smoothing_bins;
      acc -= raw[static_cast<std::size_t>(((k - w) + ln) % ln)];
      acc += raw[static_cast<std::size_t>((k + w + 1) % ln)];
    }
  }

  Psd psd;
  psd.bin_hz = fs / static_cast<double>(n);
  psd.freq_hz.resize(n);
  psd.density.resize(n);
  // fftshift to an ascending grid
  const std::size_t half = n / 2 + (n % 2);  // number of non-negative bins
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = (i + half) % n;  // natural-order index
    psd.freq_hz[i] = bin_freq(k, n, fs);
    psd.density[i] = smooth[k];
  }
  return psd;
}

}  // namespace bridgesim
