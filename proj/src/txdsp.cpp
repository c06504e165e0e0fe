#include "bridgesim/txdsp.hpp"

#include <algorithm>
#include <cmath>

#include "bridgesim/fft.hpp"
#include "bridgesim/rng.hpp"

namespace bridgesim {

namespace {

// shape, rotate by the bias phase, and shift the sideband to fc (already
// snapped); returns the data component only
ComplexFrame shaped_sideband(const SymbolStream& symbols, double rolloff,
                             int sps, int span, double baud, double bias,
                             double fc) {
  auto taps = rrc_taps(rolloff, sps, span);
  ComplexFrame sig = shape_periodic(symbols, taps, sps, baud);
  const cplx rot = std::polar(1.0, bias);
  for (auto& s : sig.samples) s *= rot;
  freq_shift_inplace(sig, fc);
  return sig;
}

}  // namespace

ComplexFrame make_ssb_with_pilot(const SymbolStream& symbols,
                                 const SsbConfig& cfg, SsbFrameInfo* info) {
  check(cfg.guard_band() > 0.0,
        "make_ssb_with_pilot: sideband overlaps the pilot "
        "(upconversion must exceed half the signal bandwidth)");
  check(cfg.upconversion_hz + cfg.signal_bandwidth() / 2.0 <
            cfg.sample_rate() / 2.0,
        "make_ssb_with_pilot: sideband exceeds Nyquist, raise sps");

  const std::size_t n = symbols.size() * static_cast<std::size_t>(cfg.sps);
  const double fs = cfg.sample_rate();
  const double fc = snap_to_bin(cfg.upconversion_hz, n, fs);

  ComplexFrame frame = shaped_sideband(symbols, cfg.rolloff, cfg.sps,
                                       cfg.span_symbols, cfg.baud_hz,
                                       cfg.bias_phase_rad, fc);
  const double sig_power = frame.power();
  double amp = 0.0;
  if (cfg.pilot_enabled) {
    amp = std::sqrt(db_to_lin(cfg.ptspr_db) * sig_power);
    for (auto& s : frame.samples) s += amp;
  }
  if (info) {
    info->carrier_hz = fc;
    info->pilot_amplitude = amp;
    info->signal_power = sig_power;
  }
  return frame;
}

ComplexFrame make_twin_ssb(const SymbolStream& ch1, const SymbolStream& ch2,
                           const TwinSsbConfig& cfg, SsbFrameInfo* info) {
  check(cfg.guard_band() > 0.0,
        "make_twin_ssb: sidebands overlap at the pilot "
        "(upconversion must exceed half the signal bandwidth)");
  check(cfg.upconversion_hz + cfg.signal_bandwidth() / 2.0 <
            cfg.sample_rate() / 2.0,
        "make_twin_ssb: sidebands exceed Nyquist, raise sps");
  check(!ch1.symbols.empty() || !ch2.symbols.empty(),
        "make_twin_ssb: both channels empty");
  if (!ch1.symbols.empty() && !ch2.symbols.empty()) {
    check(ch1.size() == ch2.size(), "make_twin_ssb: channel lengths differ");
  }

  const std::size_t n_sym = ch1.symbols.empty() ? ch2.size() : ch1.size();
  const std::size_t n = n_sym * static_cast<std::size_t>(cfg.sps);
  const double fs = cfg.sample_rate();
  const double fc = snap_to_bin(cfg.upconversion_hz, n, fs);

  ComplexFrame frame;
  frame.sample_rate = fs;
  frame.samples.assign(n, cplx(0.0, 0.0));
  if (!ch1.symbols.empty()) {
    ComplexFrame a = shaped_sideband(ch1, cfg.rolloff, cfg.sps,
                                     cfg.span_symbols, cfg.baud_hz,
                                     cfg.bias_phase_rad, -fc);
    for (std::size_t i = 0; i < n; ++i) frame.samples[i] += a.samples[i];
  }
  if (!ch2.symbols.empty()) {
    ComplexFrame b = shaped_sideband(ch2, cfg.rolloff, cfg.sps,
                                     cfg.span_symbols, cfg.baud_hz,
                                     cfg.bias_phase_rad, fc);
    for (std::size_t i = 0; i < n; ++i) frame.samples[i] += b.samples[i];
  }

  // nominal two-channel data power for unit-energy symbols: each shaped
  // channel carries (tap energy = 1) / sps
  const auto taps = rrc_taps(cfg.rolloff, cfg.sps, cfg.span_symbols);
  double tap_energy = 0.0;
  for (double t : taps) tap_energy += t * t;
  const double nominal_power = 2.0 * tap_energy / cfg.sps;

  double amp = 0.0;
  if (cfg.pilot_enabled) {
    amp = std::sqrt(db_to_lin(cfg.ptspr_db) * nominal_power);
    for (auto& s : frame.samples) s += amp;
  }
  if (info) {
    info->carrier_hz = fc;
    info->pilot_amplitude = amp;
    info->signal_power = nominal_power;
  }
  return frame;
}

std::vector<double> wdm_channel_freqs(const WdmGrid& grid) {
  check(grid.count >= 1, "wdm_channel_freqs: count must be >= 1");
  check(grid.spacing_hz > 0.0, "wdm_channel_freqs: spacing must be positive");
  check(grid.anchor_hz > 0.0, "wdm_channel_freqs: anchor must be positive");
  check(grid.anchor_index >= 0, "wdm_channel_freqs: anchor index negative");
  const int a = std::min(grid.anchor_index, grid.count - 1);
  std::vector<double> freqs(static_cast<std::size_t>(grid.count));
  for (int i = 0; i < grid.count; ++i) {
    freqs[static_cast<std::size_t>(i)] =
        grid.anchor_hz + static_cast<double>(i - a) * grid.spacing_hz;
  }
  return freqs;
}

ComplexFrame apply_decorrelation_delay(const ComplexFrame& frame,
                                       double delay_symbols, double baud_hz) {
  check(baud_hz > 0.0, "apply_decorrelation_delay: baud must be positive");
  check(delay_symbols >= 0.0, "apply_decorrelation_delay: delay must be >= 0");
  if (delay_symbols == 0.0) return frame;
  const double tau = delay_symbols / baud_hz;
  ComplexFrame out = frame;
  std::vector<cplx> spec = fft(frame.samples);
  const std::size_t n = spec.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double f = bin_freq(k, n, frame.sample_rate);
    spec[k] *= std::polar(1.0, -2.0 * pi * f * tau);
  }
  out.samples = ifft(spec);
  return out;
}

SymbolStream build_payload(int order, int periods, std::uint64_t seed,
                           const Constellation& c) {
  check(periods >= 1, "build_payload: need at least one period");
  BitStream period_bits;
  period_bits.origin = "payload";
  for (int i = 0; i < 4; ++i) {
    BitStream seq = generate_de_bruijn(
        order, Rng::derive(seed, "de-bruijn-phase", static_cast<std::uint64_t>(i)));
    period_bits.bits.insert(period_bits.bits.end(), seq.bits.begin(),
                            seq.bits.end());
  }
  BitStream all;
  all.origin = period_bits.origin;
  all.bits.reserve(period_bits.size() * static_cast<std::size_t>(periods));
  for (int r = 0; r < periods; ++r) {
    all.bits.insert(all.bits.end(), period_bits.bits.begin(),
                    period_bits.bits.end());
  }
  return map_qam16(all, c);
}

}  // namespace bridgesim
