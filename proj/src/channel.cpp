#include "bridgesim/channel.hpp"

#include <algorithm>
#include <cmath>

#include "bridgesim/fft.hpp"
#include "bridgesim/rng.hpp"
#include "bridgesim/spectral.hpp"

namespace bridgesim {

ComplexFrame apply_phase_noise(const ComplexFrame& frame, const LaserSpec& laser,
                               std::vector<double>* trajectory) {
  check(laser.lorentzian_linewidth >= 0.0, "phase noise: linewidth must be >= 0");
  check(frame.sample_rate > 0.0, "phase noise: frame has no sample rate");
  ComplexFrame out = frame;
  if (trajectory) trajectory->assign(frame.size(), 0.0);
  if (laser.lorentzian_linewidth == 0.0) return out;

  Rng rng = Rng::stream(laser.seed, "phase-noise");
  const std::size_t n = out.samples.size();
  const double step =
      std::sqrt(2.0 * pi * laser.lorentzian_linewidth / frame.sample_rate);
  // Pinned random walk: subtracting the linear ramp makes the trajectory
  // return to its start, so the frame stays one period of a periodic
  // process and spectral filters see a regular step at the wrap, not the
  // walk's full excursion. Only the DC bin of the increment spectrum
  // changes; the white frequency-noise floor is untouched.
  std::vector<double> walk(n + 1);
  walk[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) walk[i] = walk[i - 1] + step * rng.normal();
  const double ramp = walk[n] / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = walk[i] - ramp * static_cast<double>(i);
    out.samples[i] *= cplx(std::cos(phi), std::sin(phi));
    if (trajectory) (*trajectory)[i] = phi;
  }
  return out;
}

ComplexFrame apply_freq_offset(const ComplexFrame& frame, double offset_hz,
                               double* applied_hz) {
  check(std::abs(offset_hz) < frame.sample_rate / 2.0,
        "frequency offset: |offset| must be below Nyquist");
  // Quantized to the frame's spectral grid so the shifted frame is still
  // one period of a periodic signal (at most half a bin of quantization,
  // around 50 kHz for the canonical frames; receivers never resolve finer).
  const double snapped = snap_to_bin(offset_hz, frame.size(), frame.sample_rate);
  if (applied_hz) *applied_hz = snapped;
  return freq_shift(frame, snapped);
}

ComplexFrame apply_awgn(const ComplexFrame& frame, double target_snr_db,
                        double signal_band_hz, std::uint64_t seed) {
  ComplexFrame out = frame;
  if (std::isinf(target_snr_db) && target_snr_db > 0.0) return out;
  check(std::isfinite(target_snr_db), "awgn: target SNR must be finite or +inf");
  check(signal_band_hz > 0.0 && signal_band_hz <= frame.sample_rate,
        "awgn: signal band must fit inside the sampled bandwidth");
  const double p_sig = frame.power();
  check(p_sig > 0.0, "awgn: frame has no power");

  // White noise spreads over the full sample rate; only the fraction inside
  // signal_band_hz counts against the signal, so the total injected power is
  // scaled up by fs / band.
  const double n_total = p_sig * frame.sample_rate /
                         (signal_band_hz * db_to_lin(target_snr_db));
  const double amp = std::sqrt(n_total);
  Rng rng = Rng::stream(seed, "awgn");
  for (auto& s : out.samples) s += amp * rng.cnormal();
  return out;
}

double photocurrent_to_snr(const PowerModel& model) {
  check(model.photocurrent > 0.0 && model.ref_photocurrent > 0.0,
        "power model: photocurrents must be positive");
  return model.snr_at_ref +
         20.0 * std::log10(model.photocurrent / model.ref_photocurrent);
}

ComplexFrame apply_if_response(const ComplexFrame& frame, const IfResponse& resp) {
  check(resp.low_cut >= 0.0 && resp.low_cut < resp.high_cut,
        "IF response: need 0 <= low_cut < high_cut");
  const double lc = resp.low_cut;
  const double hc = resp.high_cut;
  return apply_response(frame, [lc, hc](double f_abs) {
    const double f = std::abs(f_abs);
    double hp = 1.0;
    if (lc > 0.0) {
      const double r = f / lc;
      hp = r / std::sqrt(1.0 + r * r);
    }
    const double q = (f / hc) * (f / hc);
    const double lp = 1.0 / std::sqrt(1.0 + q * q);
    return cplx(hp * lp, 0.0);
  });
}

ComplexFrame apply_saturation(const ComplexFrame& frame, double sat_input_power,
                              double knee) {
  check(sat_input_power > 0.0, "saturation: sat_input_power must be positive");
  check(knee > 0.0, "saturation: knee must be positive");
  ComplexFrame out = frame;
  for (auto& s : out.samples) {
    const double drive = std::norm(s) / sat_input_power;
    s /= std::pow(1.0 + std::pow(drive, knee), 1.0 / (2.0 * knee));
  }
  return out;
}

ComplexFrame apply_lowfreq_noise(const ComplexFrame& frame, double rel_power_db,
                                 double corner_hz, std::uint64_t seed) {
  check(corner_hz > 0.0, "low-frequency noise: corner must be positive");
  const std::size_t n = frame.size();
  check(n > 0, "low-frequency noise: empty frame");
  const double p_sig = frame.power();
  check(p_sig > 0.0, "low-frequency noise: frame has no power");

  Rng rng = Rng::stream(seed, "lowfreq-noise");
  std::vector<cplx> noise(n);
  for (auto& s : noise) s = rng.cnormal();
  noise = fft(noise);
  for (std::size_t k = 0; k < n; ++k) {
    const double f =
        std::abs(bin_freq(k, n, frame.sample_rate) + frame.center_offset);
    noise[k] /= std::sqrt(1.0 + (f / corner_hz) * (f / corner_hz));
  }
  noise = ifft(noise);

  // normalize after shaping so the injected power is exact
  const double target = p_sig * db_to_lin(rel_power_db);
  const double scale = std::sqrt(target / mean_power(noise));
  ComplexFrame out = frame;
  for (std::size_t i = 0; i < n; ++i) out.samples[i] += scale * noise[i];
  return out;
}

double antenna_gain_db(double lens_diameter_m, double carrier_freq_hz) {
  check(lens_diameter_m > 0.0, "antenna gain: diameter must be positive");
  check(carrier_freq_hz > 0.0, "antenna gain: frequency must be positive");
  const double c = 299792458.0;
  const double lambda = c / carrier_freq_hz;
  const double aperture = pi * lens_diameter_m * lens_diameter_m / 4.0;
  return 10.0 * std::log10(4.0 * pi * aperture / (lambda * lambda));
}

double wdm_response_db(double carrier_freq_hz) {
  const double knee_hz = 224e9;
  const double slope_db_per_hz = -0.045e-9;
  const double floor_db = -6.0;
  const double excess = std::max(0.0, carrier_freq_hz - knee_hz);
  return std::max(floor_db, slope_db_per_hz * excess);
}

}  // namespace bridgesim
