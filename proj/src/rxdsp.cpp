#include "bridgesim/rxdsp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bridgesim/fft.hpp"
#include "bridgesim/metrics.hpp"

namespace bridgesim {

ComplexFrame extract_pilot(const ComplexFrame& frame, const PilotFilterCfg& cfg,
                           double guard_band) {
  check(guard_band > 0.0, "extract_pilot: guard band must be positive");
  check(cfg.bandwidth > 0.0 && cfg.bandwidth < guard_band,
        "extract_pilot: filter bandwidth must fit inside the guard band");
  ComplexFrame tone = band_select(frame, cfg.bandwidth, cfg.shape);
  const double rms = std::sqrt(tone.power());
  check(rms > 0.0, "extract_pilot: nothing inside the pilot filter");

  // discard the envelope, keep the phase trajectory; where the envelope
  // collapses, coast on the previous phasor
  const double eps = 1e-6 * rms;
  cplx last(1.0, 0.0);
  for (auto& s : tone.samples) {
    const double mag = std::abs(s);
    s = (mag > eps) ? s / mag : last;
    last = s;
  }
  return tone;
}

ComplexFrame pilot_downconvert(const ComplexFrame& frame,
                               const ComplexFrame& tone, double f_c) {
  check(frame.size() == tone.size(), "pilot_downconvert: length mismatch");
  check(frame.sample_rate == tone.sample_rate,
        "pilot_downconvert: sample-rate mismatch");
  ComplexFrame out = frame;
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    const cplx t = tone.samples[i];
    const double mag = std::abs(t);
    if (mag > 0.0) out.samples[i] *= std::conj(t) / mag;
  }
  freq_shift_inplace(out, -f_c);
  return out;
}

std::optional<double> fft_foe(const std::vector<cplx>& symbols, double baud) {
  check(symbols.size() >= 4096, "fft_foe: need at least 4096 symbols");
  check(baud > 0.0, "fft_foe: baud must be positive");
  const std::size_t n = symbols.size();
  std::vector<cplx> s4(n);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx s2 = symbols[i] * symbols[i];
    s4[i] = s2 * s2;
  }
  s4 = fft(s4);

  std::vector<double> mag(n);
  for (std::size_t k = 0; k < n; ++k) mag[k] = std::norm(s4[k]);
  const std::size_t kmax =
      static_cast<std::size_t>(std::max_element(mag.begin(), mag.end()) -
                               mag.begin());

  // The median is a robust floor estimate (one line cannot move it). A
  // featureless exponential periodogram tops out near ln(n) times the mean,
  // about 11 dB over its median at these lengths, while a real fourth-power
  // line clears 25 dB, so 16 dB splits the two cleanly.
  std::vector<double> tmp = mag;
  std::nth_element(tmp.begin(), tmp.begin() + n / 2, tmp.end());
  const double median = tmp[n / 2];
  if (mag[kmax] < 40.0 * median) return std::nullopt;

  // parabolic refinement on the log magnitude, circular neighbors
  const double tiny = 1e-300;
  const double ym1 = std::log(std::max(mag[(kmax + n - 1) % n], tiny));
  const double y0 = std::log(std::max(mag[kmax], tiny));
  const double yp1 = std::log(std::max(mag[(kmax + 1) % n], tiny));
  double delta = 0.0;
  const double denom = ym1 - 2.0 * y0 + yp1;
  if (denom < 0.0) delta = 0.5 * (ym1 - yp1) / denom;
  if (!std::isfinite(delta) || std::abs(delta) > 0.5) delta = 0.0;

  double kb = static_cast<double>(kmax);
  if (kmax >= (n + 1) / 2) kb -= static_cast<double>(n);
  const double f4 = (kb + delta) * baud / static_cast<double>(n);
  // Offsets beyond baud/8 alias back into the window (the fourth-power
  // spectrum only spans one symbol-rate period), so they cannot be flagged
  // here; staying inside the window is the caller's contract.
  return f4 / 4.0;
}

namespace {

// wrap to (-pi/4, pi/4]
double wrap_quarter(double x) {
  x = std::fmod(x, pi / 2.0);
  if (x > pi / 4.0) x -= pi / 2.0;
  if (x <= -pi / 4.0) x += pi / 2.0;
  return x;
}

}  // namespace

BpsResult bps_recover(const std::vector<cplx>& symbols, const BpsCfg& cfg,
                      const Constellation& c, const std::vector<cplx>& preamble,
                      std::size_t preamble_pos) {
  check(cfg.test_phases >= 4 && cfg.test_phases % 4 == 0,
        "bps: test_phases must be >= 4 and divisible by 4");
  check(cfg.block_length >= 8, "bps: block_length must be >= 8");
  check(!symbols.empty(), "bps: empty input");
  check(!preamble.empty(), "bps: empty preamble");
  check(preamble_pos + preamble.size() <= symbols.size(),
        "bps: preamble window outside the input");

  const std::size_t n = symbols.size();
  const int m = cfg.test_phases;
  const std::size_t bl = static_cast<std::size_t>(cfg.block_length);
  const std::size_t blocks = (n + bl - 1) / bl;

  // candidate derotations span one quadrant; anything beyond is an alias
  std::vector<cplx> rot(m);
  for (int i = 0; i < m; ++i) {
    const double ph = (pi / 2.0) * i / m;
    rot[i] = cplx(std::cos(ph), -std::sin(ph));
  }

  std::vector<double> block_phase(blocks);
  double prev = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * bl;
    const std::size_t hi = std::min(n, lo + bl);
    double best_cost = std::numeric_limits<double>::infinity();
    int best = 0;
    for (int i = 0; i < m; ++i) {
      double cost = 0.0;
      for (std::size_t k = lo; k < hi; ++k) {
        const cplx y = symbols[k] * rot[i];
        cost += std::norm(y - c.points[c.decide(y)]);
      }
      if (cost < best_cost) {
        best_cost = cost;
        best = i;
      }
    }
    const double raw = (pi / 2.0) * best / m;
    prev += wrap_quarter(raw - prev);  // unwrap modulo pi/2
    block_phase[b] = prev;
  }

  // global quadrant against the known preamble
  int best_k = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 4; ++k) {
    const cplx q(std::cos(k * pi / 2.0), -std::sin(k * pi / 2.0));
    double err = 0.0;
    for (std::size_t i = 0; i < preamble.size(); ++i) {
      const std::size_t j = preamble_pos + i;
      const double ph = block_phase[j / bl];
      err += std::norm(symbols[j] * cplx(std::cos(ph), -std::sin(ph)) * q -
                       preamble[i]);
    }
    if (err < best_err) {
      best_err = err;
      best_k = k;
    }
  }

  BpsResult res;
  res.phase.resize(n);
  res.symbols.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double ph = block_phase[j / bl] + best_k * pi / 2.0;
    res.phase[j] = ph;
    res.symbols[j] = symbols[j] * cplx(std::cos(ph), -std::sin(ph));
  }
  return res;
}

std::optional<double> vv_fixed_offset(const std::vector<cplx>& symbols,
                                      const Constellation& c) {
  check(!symbols.empty(), "vv: empty input");
  check(c.radii.size() >= 2, "vv: constellation has no ring structure");
  const double r_in = c.radii.front();
  const double r_out = c.radii.back();
  cplx acc(0.0, 0.0);
  std::size_t count = 0;
  for (const auto& s : symbols) {
    const double r = c.nearest_radius(std::abs(s));
    if (r == r_in || r == r_out) {
      const cplx s2 = s * s;
      acc += s2 * s2;
      ++count;
    }
  }
  if (count < 100) return std::nullopt;
  // Class-I ideal phases sit at pi/4 + k pi/2, so arg(sum s^4) = pi + 4 theta
  return wrap_phase(std::arg(acc) - pi) / 4.0;
}

EqResult equalize(const std::vector<cplx>& x2, const EqualizerCfg& cfg,
                  const Constellation& c, const std::vector<cplx>* training,
                  bool rde_only) {
  check(cfg.taps >= 3 && cfg.taps % 2 == 1,
        "equalizer: taps must be odd and >= 3");
  check(cfg.step_rde > 0.0 && cfg.step_dd > 0.0,
        "equalizer: steps must be positive");
  check(cfg.switch_threshold > 0.0, "equalizer: switch threshold must be positive");
  check(cfg.max_epochs >= 1, "equalizer: need at least one epoch");
  check(x2.size() % 2 == 0 && !x2.empty(),
        "equalizer: input must be 2 samples per symbol");
  const std::size_t n2 = x2.size();
  const std::size_t n = n2 / 2;
  check(n2 >= static_cast<std::size_t>(cfg.taps),
        "equalizer: frame shorter than the filter");

  // unit mean sample power so the radius targets line up with the
  // constellation scale
  const double p_in = mean_power(x2);
  check(p_in > 0.0, "equalizer: input has no power");
  const double g = 1.0 / std::sqrt(p_in);
  std::vector<cplx> x(n2);
  for (std::size_t i = 0; i < n2; ++i) x[i] = x2[i] * g;

  const int t = cfg.taps;
  const int ctr = (t - 1) / 2;
  std::vector<cplx> w(t, cplx(0.0, 0.0));
  w[ctr] = 1.0;

  const auto filt = [&](std::size_t msym) {
    cplx y(0.0, 0.0);
    const std::size_t base = 2 * msym + n2 - static_cast<std::size_t>(ctr);
    for (int k = 0; k < t; ++k) y += w[k] * x[(base + k) % n2];
    return y;
  };

  EqResult res;
  res.status = EqStatus::max_epochs_reached;
  bool dd = false;
  bool settled = false;
  double p_ema = 1.0;  // tracks recent output power; input is unit power

  // The RDE stage ends when the tap vector stops drifting: the net change
  // over a block, per update, falls below the threshold. Random-walk jitter
  // from noise averages out over the block, systematic motion does not.
  const std::size_t drift_block = 1024;
  std::vector<cplx> w_mark = w;

  std::size_t update = 0;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    for (std::size_t msym = 0; msym < n; ++msym) {
      const cplx y = filt(msym);
      p_ema = 0.99 * p_ema + 0.01 * std::norm(y);
      if (p_ema > 10.0) {
        res.status = EqStatus::diverged;
        res.taps = w;
        return res;
      }
      cplx e;
      double mu;
      const bool train = training && epoch == 0 &&
                         msym < static_cast<std::size_t>(cfg.training_symbols);
      if (dd) {
        e = c.points[c.decide(y)] - y;
        mu = cfg.step_dd;
      } else if (train) {
        e = (*training)[msym] - y;
        mu = cfg.step_rde;
      } else {
        const double r = c.nearest_radius(std::abs(y));
        e = y * (r * r - std::norm(y));
        mu = cfg.step_rde;
      }
      const cplx me = mu * e;
      const std::size_t base = 2 * msym + n2 - static_cast<std::size_t>(ctr);
      for (int k = 0; k < t; ++k) w[k] += me * std::conj(x[(base + k) % n2]);

      if (!settled && ++update % drift_block == 0) {
        double drift2 = 0.0;
        for (int k = 0; k < t; ++k) drift2 += std::norm(w[k] - w_mark[k]);
        const double per_update =
            std::sqrt(drift2) / static_cast<double>(drift_block);
        w_mark = w;
        if (per_update < cfg.switch_threshold) {
          settled = true;
          if (!rde_only) dd = true;
        }
      }
    }
  }
  if (settled) res.status = EqStatus::converged;

  // freeze and refilter so no adaptation transient leaks into the output
  res.symbols.resize(n);
  double p_out = 0.0;
  for (std::size_t msym = 0; msym < n; ++msym) {
    res.symbols[msym] = filt(msym);
    p_out += std::norm(res.symbols[msym]);
  }
  if (p_out / static_cast<double>(n) > 10.0) res.status = EqStatus::diverged;
  res.taps = w;
  return res;
}

std::size_t coarse_align(const std::vector<cplx>& rx,
                         const std::vector<cplx>& ref_period) {
  const std::size_t p = ref_period.size();
  check(p > 0 && rx.size() >= p, "coarse_align: input shorter than the period");
  std::vector<double> fold(p, 0.0);
  for (std::size_t j = 0; j < rx.size(); ++j) fold[j % p] += std::norm(rx[j]);

  double ma = 0.0, mb = 0.0;
  for (double v : fold) ma += v;
  ma /= static_cast<double>(p);
  std::vector<cplx> a(p), b(p);
  for (std::size_t i = 0; i < p; ++i) {
    mb += std::norm(ref_period[i]);
  }
  mb /= static_cast<double>(p);
  for (std::size_t i = 0; i < p; ++i) {
    a[i] = fold[i] - ma;
    b[i] = std::norm(ref_period[i]) - mb;
  }
  a = fft(a);
  b = fft(b);
  for (std::size_t k = 0; k < p; ++k) a[k] *= std::conj(b[k]);
  a = ifft(a);
  std::size_t best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < p; ++d) {
    if (a[d].real() > best_v) {
      best_v = a[d].real();
      best = d;
    }
  }
  return best;
}

BerRecord sync_and_count(const std::vector<cplx>& rx,
                         const SymbolStream& ref_period, const Constellation& c) {
  const std::size_t p = ref_period.size();
  check(p > 0, "sync: empty reference");
  check(rx.size() >= p, "sync: received stream shorter than one period");
  check(ref_period.bits_per_symbol == c.bits_per_symbol,
        "sync: constellation does not match the reference");
  check(ref_period.source_bits.size() ==
            p * static_cast<std::size_t>(c.bits_per_symbol),
        "sync: reference bits missing");

  // coherent fold over the period, then one circular cross-correlation
  std::vector<cplx> fold(p, cplx(0.0, 0.0));
  for (std::size_t j = 0; j < rx.size(); ++j) fold[j % p] += rx[j];

  double ea = 0.0, eb = 0.0;
  for (const auto& v : fold) ea += std::norm(v);
  for (const auto& v : ref_period.symbols) eb += std::norm(v);

  std::vector<cplx> fa = fft(fold);
  const std::vector<cplx> fb = fft(ref_period.symbols);
  for (std::size_t k = 0; k < p; ++k) fa[k] *= std::conj(fb[k]);
  fa = ifft(fa);

  std::size_t best_d = 0;
  double best_mag = -1.0;
  for (std::size_t d = 0; d < p; ++d) {
    const double v = std::norm(fa[d]);
    if (v > best_mag) {
      best_mag = v;
      best_d = d;
    }
  }

  BerRecord rec;
  rec.delay = best_d;
  // the peak's phase is the global rotation left by mod-pi/2 recovery
  rec.rotation = pi / 2.0 *
                 std::round(std::arg(fa[best_d]) / (pi / 2.0));
  const cplx derot = std::polar(1.0, -rec.rotation);
  rec.corr_peak = (ea > 0.0 && eb > 0.0)
                      ? (fa[best_d] * derot).real() / std::sqrt(ea * eb)
                      : 0.0;
  if (!(rec.corr_peak >= 0.5)) return rec;  // sync_failed

  // Data-aided gain: a blind equalizer holds signal plus noise at the ring
  // power, which leaves the signal itself shrunk by the noise share. Fit the
  // complex gain against the reference so the slicer sees a centered grid
  // (the fit also polishes the fine phase left after quadrant snapping).
  cplx num(0.0, 0.0);
  double den = 0.0;
  for (std::size_t j = 0; j < rx.size(); ++j) {
    const std::size_t i = (j % p + p - best_d) % p;
    num += rx[j] * derot * std::conj(ref_period.symbols[i]);
    den += std::norm(ref_period.symbols[i]);
  }
  const cplx gain = num / den;  // the corr gate keeps this away from zero

  const int bps = c.bits_per_symbol;
  std::uint64_t errors = 0;
  for (std::size_t j = 0; j < rx.size(); ++j) {
    const std::size_t i = (j % p + p - best_d) % p;
    const int label = c.decide(rx[j] * derot / gain);
    for (int b = 0; b < bps; ++b) {
      const int tx_bit = ref_period.source_bits.bits[i * bps + b];
      const int rx_bit = (label >> (bps - 1 - b)) & 1;
      if (tx_bit != rx_bit) ++errors;
    }
  }
  rec.status = SyncStatus::ok;
  rec.errors = errors;
  rec.bits = static_cast<std::uint64_t>(rx.size()) * bps;
  rec.ber = static_cast<double>(errors) / static_cast<double>(rec.bits);
  const auto ci = wilson_interval(errors, rec.bits);
  rec.wilson_lo = ci.first;
  rec.wilson_hi = ci.second;
  return rec;
}

}  // namespace bridgesim
