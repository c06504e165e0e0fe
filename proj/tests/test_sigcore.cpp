#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "bridgesim/fft.hpp"
#include "bridgesim/rng.hpp"
#include "bridgesim/sigcore.hpp"
#include "bridgesim/spectral.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bridgesim;

namespace {

std::set<unsigned> circular_windows(const BitStream& s, int order) {
  std::set<unsigned> w;
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i) {
    unsigned v = 0;
    for (int k = 0; k < order; ++k)
      v = (v << 1) | s.bits[(i + static_cast<std::size_t>(k)) % n];
    w.insert(v);
  }
  return w;
}

SymbolStream random_symbols(std::size_t n, std::uint64_t seed) {
  const Constellation& c = Constellation::qam16();
  Rng rng(seed);
  SymbolStream s;
  s.bits_per_symbol = c.bits_per_symbol;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(rng.next_u64() % 16u);
    s.symbols.push_back(c.points[static_cast<std::size_t>(label)]);
    for (int b = 3; b >= 0; --b)
      s.source_bits.bits.push_back(static_cast<std::uint8_t>((label >> b) & 1));
  }
  return s;
}

}  // namespace

TEST_CASE("de Bruijn periods contain every window exactly once") {
  for (int order : {4, 8, 11}) {
    const BitStream s = generate_de_bruijn(order, 1);
    CHECK(s.size() == (1u << order));
    const auto w = circular_windows(s, order);
    CHECK(w.size() == (1u << order));  // all 2^order windows, each once
    // balanced: exactly half ones
    std::size_t ones = 0;
    for (auto b : s.bits) ones += b;
    CHECK(ones == (1u << (order - 1)));
  }
}

TEST_CASE("de Bruijn seeds rotate the sequence without breaking it") {
  const BitStream a = generate_de_bruijn(10, 1);
  const BitStream b = generate_de_bruijn(10, 2);
  CHECK(a.bits != b.bits);
  CHECK(circular_windows(a, 10) == circular_windows(b, 10));
  const BitStream a2 = generate_de_bruijn(10, 1);
  CHECK(a.bits == a2.bits);  // deterministic
}

TEST_CASE("gray mapping is unit energy, MSB first, and adjacency-consistent") {
  const Constellation& c = Constellation::qam16();
  CHECK(c.bits_per_symbol == 4);
  CHECK(c.points.size() == 16);

  double e = 0.0;
  for (const auto& p : c.points) e += std::norm(p);
  CHECK(e / 16.0 == doctest::Approx(1.0).epsilon(1e-12));

  // Gray property: nearest horizontal/vertical neighbours differ in one bit
  const double dmin = 2.0 / std::sqrt(10.0);
  for (int i = 0; i < 16; ++i)
    for (int j = i + 1; j < 16; ++j) {
      if (std::abs(std::abs(c.points[i] - c.points[j]) - dmin) < 1e-9) {
        const int diff = i ^ j;
        CHECK(((diff & (diff - 1)) == 0));  // single bit flips between neighbours
      }
    }

  // MSB-first label order
  BitStream bits;
  bits.bits = {1, 0, 1, 1, 0, 0, 0, 0};
  const SymbolStream mapped = map_qam16(bits, c);
  REQUIRE(mapped.size() == 2);
  CHECK(std::abs(mapped.symbols[0] - c.points[0b1011]) < 1e-15);
  CHECK(std::abs(mapped.symbols[1] - c.points[0]) < 1e-15);
}

TEST_CASE("demapper inverts the mapper through mild noise") {
  const Constellation& c = Constellation::qam16();
  const BitStream src = generate_de_bruijn(12, 3);
  SymbolStream s = map_qam16(src, c);
  Rng rng(7);
  for (auto& p : s.symbols) p += 0.05 * rng.cnormal();
  const BitStream back = demap_nearest(s, c);
  CHECK(back.bits == src.bits);
}

TEST_CASE("rrc taps: unit energy, symmetric, Nyquist intersymbol nulls") {
  for (double rolloff : {0.1, 0.35}) {
    const int sps = 10, span = 32;
    const auto h = rrc_taps(rolloff, sps, span);
    CHECK(h.size() == static_cast<std::size_t>(span * sps + 1));

    double e = 0.0;
    for (double v : h) e += v * v;
    CHECK(e == doctest::Approx(1.0).epsilon(1e-9));

    for (std::size_t k = 0; k < h.size(); ++k)
      CHECK(h[k] == doctest::Approx(h[h.size() - 1 - k]).epsilon(1e-12));

    // h * h is a raised cosine: zero at nonzero symbol multiples
    std::vector<cplx> hc(h.begin(), h.end());
    const auto rc = oracle::naive_linear_conv(hc, h);
    const std::size_t ctr = (rc.size() - 1) / 2;
    const double peak = rc[ctr].real();
    CHECK(peak > 0.0);
    for (int m = 1; m <= span / 2 - 1; ++m) {
      const double isi =
          std::abs(rc[ctr + static_cast<std::size_t>(m * sps)]) / peak;
      CHECK(isi < 2e-3);  // truncation-limited, span 32 symbols
    }
  }
}

TEST_CASE("linear shaping reproduces the taps and obeys the length contract") {
  const auto h = rrc_taps(0.1, 4, 8);
  SymbolStream one;
  one.bits_per_symbol = 4;
  one.symbols = {cplx(1.0, 0.0)};
  const ComplexFrame f = shape(one, h, 4, 5e9);
  REQUIRE(f.size() == 1 * 4 + h.size() - 1);
  for (std::size_t i = 0; i < h.size(); ++i)
    CHECK(std::abs(f.samples[i] - cplx(h[i], 0.0)) < 1e-12);
  for (std::size_t i = h.size(); i < f.size(); ++i)
    CHECK(std::abs(f.samples[i]) < 1e-12);
  CHECK(f.sample_rate == doctest::Approx(4 * 5e9));
}

TEST_CASE("periodic shaping equals naive circular convolution of the upsampled train") {
  const int sps = 4;
  const auto h = rrc_taps(0.25, sps, 8);
  const SymbolStream s = random_symbols(32, 11);
  const ComplexFrame f = shape_periodic(s, h, sps, 1e9);
  REQUIRE(f.size() == s.size() * static_cast<std::size_t>(sps));

  std::vector<cplx> up(s.size() * static_cast<std::size_t>(sps), cplx(0.0, 0.0));
  for (std::size_t i = 0; i < s.size(); ++i)
    up[i * static_cast<std::size_t>(sps)] = s.symbols[i];
  // same convention as circular_filter: the (taps-1)/2 group delay stays in
  const auto conv = oracle::naive_circular_conv(up, h);
  double worst = 0.0;
  for (std::size_t m = 0; m < up.size(); ++m)
    worst = std::max(worst, std::abs(f.samples[m] - conv[m]));
  CHECK(worst < 1e-9);
}

TEST_CASE("periodic shaping of a tiled payload tiles the frame") {
  const auto h = rrc_taps(0.1, 10, 32);
  const SymbolStream period = random_symbols(512, 5);
  SymbolStream twice = period;
  twice.symbols.insert(twice.symbols.end(), period.symbols.begin(),
                       period.symbols.end());
  const ComplexFrame f = shape_periodic(twice, h, 10, 5e9);
  const std::size_t half = f.size() / 2;
  for (std::size_t i = 0; i < half; ++i)
    CHECK(std::abs(f.samples[i] - f.samples[i + half]) < 1e-9);
}

TEST_CASE("fft matches the naive transform and inverts exactly") {
  Rng rng(3);
  std::vector<cplx> x(128);
  for (auto& v : x) v = rng.cnormal();
  const auto fast = fft(x);
  const auto slow = oracle::naive_dft(x);
  REQUIRE(fast.size() == slow.size());
  for (std::size_t k = 0; k < x.size(); ++k)
    CHECK(std::abs(fast[k] - slow[k]) < 1e-9);
  const auto back = ifft(fast);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(std::abs(back[i] - x[i]) < 1e-12);
}

TEST_CASE("power spectrum satisfies Parseval and localizes a tone") {
  ComplexFrame f;
  f.sample_rate = 1e9;
  f.samples.resize(4096);
  const double tone_hz = 125e6;  // bin 512
  for (std::size_t i = 0; i < f.size(); ++i)
    f.samples[i] = std::polar(
        2.0, 2.0 * pi * tone_hz * static_cast<double>(i) / f.sample_rate);

  for (int smooth : {1, 7}) {
    const Psd psd = power_spectrum(f, smooth);
    double total = 0.0;
    for (double d : psd.density) total += d;
    CHECK(total * psd.bin_hz == doctest::Approx(f.power()).epsilon(1e-9));
  }
  const Psd psd = power_spectrum(f, 1);
  const auto it = std::max_element(psd.density.begin(), psd.density.end());
  const std::size_t k = static_cast<std::size_t>(it - psd.density.begin());
  CHECK(psd.freq_hz[k] == doctest::Approx(tone_hz).epsilon(1e-12));
  CHECK(psd.band_power(tone_hz - 1e6, tone_hz + 1e6) ==
        doctest::Approx(f.power()).epsilon(1e-9));
}

TEST_CASE("shaped payload occupies the raised-cosine 99 percent bandwidth") {
  const double baud = 5e9;
  const int sps = 10;
  const auto h = rrc_taps(0.1, sps, 32);
  const SymbolStream s = random_symbols(4096, 9);
  const ComplexFrame f = shape_periodic(s, h, sps, baud);
  const Psd psd = power_spectrum(f, 1);
  const double total = f.power();

  // bisect the measured two-sided 99% band
  double lo = 0.0, hi = f.sample_rate / 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (psd.band_power(-mid, mid) < 0.99 * total)
      lo = mid;
    else
      hi = mid;
  }
  const double measured = lo + hi;  // two-sided width
  const double expected = oracle::rc_occupied_bw(0.1, baud, 0.99);
  CHECK(measured == doctest::Approx(expected).epsilon(0.015));
}

TEST_CASE("spectral helpers: bin shifts, snapping, band selection, strongest bin") {
  ComplexFrame f;
  f.sample_rate = 1e9;
  f.samples.assign(1024, cplx(0.0, 0.0));
  const double bin = f.sample_rate / static_cast<double>(f.size());
  // tone exactly on bin 40
  for (std::size_t i = 0; i < f.size(); ++i)
    f.samples[i] = std::polar(
        1.0, 2.0 * pi * 40.0 * bin * static_cast<double>(i) / f.sample_rate);

  CHECK(strongest_bin(f, 100 * bin) == 40);
  CHECK(snap_to_bin(40.3 * bin, f.size(), f.sample_rate) ==
        doctest::Approx(40.0 * bin).epsilon(1e-12));
  CHECK(bin_freq(40, f.size(), f.sample_rate) == doctest::Approx(40.0 * bin));
  CHECK(bin_freq(f.size() - 8, f.size(), f.sample_rate) ==
        doctest::Approx(-8.0 * bin));

  const ComplexFrame rolled = bin_shift(f, -40);
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(std::abs(rolled.samples[i] - cplx(1.0, 0.0)) < 1e-9);

  const ComplexFrame moved = freq_shift(f, -40.0 * bin);
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(std::abs(moved.samples[i] - cplx(1.0, 0.0)) < 1e-9);

  // brickwall selection keeps the in-band tone exactly, kills out-of-band
  const ComplexFrame kept = band_select(f, 100.0 * bin, FilterShape::brickwall);
  CHECK(kept.power() == doctest::Approx(1.0).epsilon(1e-12));
  const ComplexFrame killed = band_select(f, 20.0 * bin, FilterShape::brickwall);
  CHECK(killed.power() < 1e-20);
}

TEST_CASE("circular filter matches the naive reference and resampling is exact") {
  Rng rng(12);
  ComplexFrame f;
  f.sample_rate = 8e9;
  f.samples.resize(256);
  // band-limited content: random low bins only, so resampling is lossless
  std::vector<cplx> spec(256, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < 20; ++k) spec[k] = rng.cnormal();
  for (std::size_t k = 236; k < 256; ++k) spec[k] = rng.cnormal();
  f.samples = ifft(spec);

  const auto h = rrc_taps(0.5, 2, 8);
  const ComplexFrame filtered = circular_filter(f, h);
  const auto ref = oracle::naive_circular_conv(f.samples, h);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    worst = std::max(worst, std::abs(filtered.samples[i] - ref[i]));
  CHECK(worst < 1e-9);

  const ComplexFrame down = resample(f, 4e9);
  REQUIRE(down.size() == 128);
  CHECK(down.sample_rate == doctest::Approx(4e9));
  // decimation of a band-limited frame keeps the samples on the shared grid
  for (std::size_t i = 0; i < down.size(); ++i)
    CHECK(std::abs(down.samples[i] - f.samples[2 * i]) < 1e-9);
  const ComplexFrame up = resample(down, 8e9);
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(std::abs(up.samples[i] - f.samples[i]) < 1e-9);
}
