#include "bridgesim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <thread>

#include "bridgesim/channel.hpp"
#include "bridgesim/metrics.hpp"
#include "bridgesim/rng.hpp"
#include "bridgesim/rxdsp.hpp"
#include "bridgesim/sigcore.hpp"
#include "bridgesim/spectral.hpp"
#include "bridgesim/txdsp.hpp"

namespace bridgesim {

std::string to_string(PointStatus s) {
  switch (s) {
    case PointStatus::ok: return "ok";
    case PointStatus::sync_failed: return "sync_failed";
    case PointStatus::foe_failed: return "foe_failed";
    case PointStatus::vv_failed: return "vv_failed";
    case PointStatus::eq_diverged: return "eq_diverged";
  }
  return "ok";
}

PointStatus point_status_from_string(const std::string& s) {
  if (s == "ok") return PointStatus::ok;
  if (s == "sync_failed") return PointStatus::sync_failed;
  if (s == "foe_failed") return PointStatus::foe_failed;
  if (s == "vv_failed") return PointStatus::vv_failed;
  if (s == "eq_diverged") return PointStatus::eq_diverged;
  throw config_error("unknown point status '" + s + "'");
}

namespace {

struct TxBundle {
  SymbolStream payload1, payload2;
  SymbolStream ref1, ref2;  // first payload period, symbols plus bits
  ComplexFrame frame;
  SsbFrameInfo info;
  // frame power over per-channel data power, in dB: 1+rho for one sideband,
  // 2(1+rho) for twin; converts the frame SNR target into data Es/N0
  double factor_db = 0.0;
  bool twin = false;
};

SymbolStream first_period(const SymbolStream& payload, std::size_t period) {
  SymbolStream ref;
  ref.bits_per_symbol = payload.bits_per_symbol;
  ref.symbols.assign(payload.symbols.begin(),
                     payload.symbols.begin() + static_cast<long>(period));
  ref.source_bits.origin = payload.source_bits.origin;
  ref.source_bits.bits.assign(
      payload.source_bits.bits.begin(),
      payload.source_bits.bits.begin() +
          static_cast<long>(period * static_cast<std::size_t>(ref.bits_per_symbol)));
  return ref;
}

// grid position of the scenario's carrier; even branches pass through the
// decorrelation delay line
std::size_t grid_index(const LinkScenario& sc) {
  const WdmGrid grid{sc.wdm_anchor, sc.wdm_spacing, sc.wdm_count,
                     sc.wdm_anchor_index};
  const auto freqs = wdm_channel_freqs(grid);
  std::size_t best = 0;
  for (std::size_t i = 1; i < freqs.size(); ++i)
    if (std::abs(freqs[i] - sc.channel_freq) <
        std::abs(freqs[best] - sc.channel_freq))
      best = i;
  return best;
}

TxBundle build_tx(const LinkScenario& sc, const Constellation& c,
                  std::uint64_t master_seed) {
  TxBundle tx;
  tx.twin = (sc.waveform == "twin-ssb");
  const std::size_t period = sc.period_symbols();
  // payloads depend only on the master seed, never on the sweep point
  tx.payload1 = build_payload(sc.payload_order, sc.payload_periods,
                              Rng::derive(master_seed, "payload", 1), c);
  tx.ref1 = first_period(tx.payload1, period);
  const double rho = db_to_lin(sc.ptspr_db);
  if (!tx.twin) {
    SsbConfig cfg;
    cfg.baud_hz = sc.baud;
    cfg.rolloff = sc.rolloff;
    cfg.sps = sc.sps;
    cfg.span_symbols = sc.span_symbols;
    cfg.upconversion_hz = sc.upconversion;
    cfg.ptspr_db = sc.ptspr_db;
    cfg.bias_phase_rad = sc.bias_phase;
    tx.frame = make_ssb_with_pilot(tx.payload1, cfg, &tx.info);
    tx.factor_db = lin_to_db(1.0 + rho);
  } else {
    tx.payload2 = build_payload(sc.payload_order, sc.payload_periods,
                                Rng::derive(master_seed, "payload", 2), c);
    tx.ref2 = first_period(tx.payload2, period);
    TwinSsbConfig cfg;
    cfg.baud_hz = sc.baud;
    cfg.rolloff = sc.rolloff;
    cfg.sps = sc.sps;
    cfg.span_symbols = sc.span_symbols;
    cfg.upconversion_hz = sc.upconversion;
    cfg.ptspr_db = sc.ptspr_db;
    cfg.bias_phase_rad = sc.bias_phase;
    tx.frame = make_twin_ssb(tx.payload1, tx.payload2, cfg, &tx.info);
    tx.factor_db = lin_to_db(2.0 * (1.0 + rho));
  }
  if (sc.wdm_decorr_symbols > 0 && grid_index(sc) % 2 == 0)
    tx.frame = apply_decorrelation_delay(tx.frame, sc.wdm_decorr_symbols, sc.baud);
  return tx;
}

void derotate(std::vector<cplx>& v, double theta) {
  const cplx r = std::polar(1.0, -theta);
  for (auto& s : v) s *= r;
}

EqualizerCfg eq_cfg(const LinkScenario& sc) {
  EqualizerCfg cfg;
  cfg.taps = sc.eq_taps;
  cfg.step_rde = sc.eq_step_rde;
  cfg.step_dd = sc.eq_step_dd;
  cfg.max_epochs = sc.eq_max_epochs;
  return cfg;
}

SnrRecord aligned_snr(const std::vector<cplx>& rx, const SymbolStream& ref,
                      std::size_t delay) {
  const std::size_t p = ref.size();
  std::vector<cplx> txv(rx.size());
  for (std::size_t j = 0; j < rx.size(); ++j)
    txv[j] = ref.symbols[(j % p + p - delay % p) % p];
  return snr_estimate(txv, rx);
}

// circular std of the recovered tone's phase against the ground-truth
// trajectory (phase-noise path plus any off-grid frequency residue)
double tone_phase_error_std(const ComplexFrame& tone,
                            const std::vector<double>& pn_traj,
                            double residual_hz) {
  const std::size_t n = tone.size();
  const double dphi = -2.0 * pi * residual_hz / tone.sample_rate;
  cplx rot = 1.0;
  const cplx step = std::polar(1.0, dphi);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cplx g = rot;
    if (!pn_traj.empty()) g *= std::polar(1.0, -pn_traj[i]);
    acc += tone.samples[i] * g;  // tone is unit magnitude
    rot *= step;
    if ((i & 1023u) == 1023u) rot = std::polar(1.0, dphi * static_cast<double>(i + 1));
  }
  const double r = std::min(1.0, std::abs(acc) / static_cast<double>(n));
  return std::sqrt(-2.0 * std::log(std::max(r, 1e-12)));
}

struct ChainOut {
  PointStatus status = PointStatus::ok;
  BerRecord rec;
  SnrRecord snr;
};

// shared tail: pass-1 radius-directed equalizer, fixed-rotation estimate,
// pass-2 full equalizer, rotation polish, synchronize and count
ChainOut equalize_and_count(ComplexFrame x2, const LinkScenario& sc,
                            const Constellation& c, const SymbolStream& ref) {
  ChainOut out;
  const EqualizerCfg cfg = eq_cfg(sc);
  EqResult e1 = equalize(x2.samples, cfg, c, nullptr, true);
  if (e1.status == EqStatus::diverged) {
    out.status = PointStatus::eq_diverged;
    return out;
  }
  const auto theta = vv_fixed_offset(e1.symbols, c);
  if (!theta) {
    out.status = PointStatus::vv_failed;
    return out;
  }
  derotate(x2.samples, *theta);
  EqResult e2 = equalize(x2.samples, cfg, c);
  if (e2.status == EqStatus::diverged) {
    out.status = PointStatus::eq_diverged;
    return out;
  }
  std::vector<cplx> sym = std::move(e2.symbols);
  if (const auto polish = vv_fixed_offset(sym, c)) derotate(sym, *polish);
  out.rec = sync_and_count(sym, ref, c);
  if (out.rec.status != SyncStatus::ok) {
    out.status = PointStatus::sync_failed;
    return out;
  }
  derotate(sym, out.rec.rotation);
  out.snr = aligned_snr(sym, ref, out.rec.delay);
  return out;
}

// tone-aided path for one sideband: joint carrier correction against the
// recovered tone, matched filter, downsample, then the shared tail
ChainOut pilot_chain(const ComplexFrame& rx, const ComplexFrame& tone,
                     double f_c, const LinkScenario& sc, const Constellation& c,
                     const std::vector<double>& mf_taps, const SymbolStream& ref) {
  ComplexFrame base = pilot_downconvert(rx, tone, f_c);
  ComplexFrame mf = circular_filter(base, mf_taps);
  ComplexFrame x2 = resample(mf, 2.0 * sc.baud);
  return equalize_and_count(std::move(x2), sc, c, ref);
}

// blind path: nominal downconversion, matched filter, downsample, pass-1
// equalizer, fourth-power frequency estimate, phase search, pass-2
ChainOut bps_chain(const ComplexFrame& ch, double carrier_hz,
                   const LinkScenario& sc, const Constellation& c,
                   const std::vector<double>& mf_taps, const SymbolStream& ref) {
  ChainOut out;
  ComplexFrame base = freq_shift(ch, -carrier_hz);
  ComplexFrame mf = circular_filter(base, mf_taps);
  ComplexFrame x2 = resample(mf, 2.0 * sc.baud);
  const EqualizerCfg cfg = eq_cfg(sc);
  EqResult e1 = equalize(x2.samples, cfg, c, nullptr, true);
  if (e1.status == EqStatus::diverged) {
    out.status = PointStatus::eq_diverged;
    return out;
  }
  const auto foe = fft_foe(e1.symbols, sc.baud);
  if (!foe) {
    out.status = PointStatus::foe_failed;
    return out;
  }
  // take the residual offset off the pass-1 symbols, then phase-search them
  std::vector<cplx> s1 = std::move(e1.symbols);
  {
    const double dphi = -2.0 * pi * (*foe) / sc.baud;
    cplx rot = 1.0;
    const cplx step = std::polar(1.0, dphi);
    for (std::size_t i = 0; i < s1.size(); ++i) {
      s1[i] *= rot;
      rot *= step;
      if ((i & 255u) == 255u) rot = std::polar(1.0, dphi * static_cast<double>(i + 1));
    }
  }
  const std::size_t d = coarse_align(s1, ref.symbols);
  const std::size_t pre_n = std::min<std::size_t>(64, ref.size());
  const std::vector<cplx> preamble(ref.symbols.begin(),
                                   ref.symbols.begin() + static_cast<long>(pre_n));
  BpsCfg bcfg;
  bcfg.test_phases = sc.bps_test_phases;
  bcfg.block_length = sc.bps_block;
  const BpsResult bps = bps_recover(s1, bcfg, c, preamble, d);
  // frequency plus per-symbol phase, applied at two samples per symbol
  {
    const double dphi = -2.0 * pi * (*foe) / (2.0 * sc.baud);
    cplx rot = 1.0;
    const cplx step = std::polar(1.0, dphi);
    for (std::size_t m = 0; m < x2.size(); ++m) {
      x2.samples[m] *= rot * std::polar(1.0, -bps.phase[m / 2]);
      rot *= step;
      if ((m & 255u) == 255u) rot = std::polar(1.0, dphi * static_cast<double>(m + 1));
    }
  }
  EqResult e2 = equalize(x2.samples, cfg, c);
  if (e2.status == EqStatus::diverged) {
    out.status = PointStatus::eq_diverged;
    return out;
  }
  std::vector<cplx> sym = std::move(e2.symbols);
  if (const auto polish = vv_fixed_offset(sym, c)) derotate(sym, *polish);
  out.rec = sync_and_count(sym, ref, c);
  if (out.rec.status != SyncStatus::ok) {
    out.status = PointStatus::sync_failed;
    return out;
  }
  derotate(sym, out.rec.rotation);
  out.snr = aligned_snr(sym, ref, out.rec.delay);
  return out;
}

void apply_axis(LinkScenario& sc, const std::string& axis, double value) {
  if (axis.empty()) return;
  if (axis == "photocurrent")
    sc.photocurrent = value * 1e-3;  // axis in mA
  else if (axis == "ptspr_db")
    sc.ptspr_db = value;
  else if (axis == "channel_freq")
    sc.channel_freq = value * 1e9;  // axis in GHz
  else
    throw config_error("unknown sweep axis '" + axis + "'");
}

bool has_impairment(const LinkScenario& sc, const char* name) {
  return std::find(sc.impairments.begin(), sc.impairments.end(), name) !=
         sc.impairments.end();
}

PointResult run_one(const LinkScenario& sc, double axis_value,
                    std::size_t index, std::uint64_t master_seed,
                    const TxBundle& tx, const Constellation& c) {
  PointResult pr;
  pr.axis_value = axis_value;
  pr.seed = Rng::derive(master_seed, "point", index);

  // Fixed-total-power bookkeeping: snr_at_ref calibrates the whole-frame
  // in-band SNR at the reference current, so raising the pilot share takes
  // power away from the data (that trade-off is what the PTSPR sweep maps).
  // The reference SNR is calibrated at the anchor carrier; other carriers
  // see the band roll-off. snr_target_db records the per-channel data Es/N0
  // that the frame target implies.
  PowerModel pm;
  pm.photocurrent = sc.photocurrent;
  pm.ref_photocurrent = sc.ref_photocurrent;
  pm.snr_at_ref = sc.snr_at_ref;
  pm.saturation_current = sc.saturation_current;
  const double frame_snr = photocurrent_to_snr(pm) +
                           wdm_response_db(sc.channel_freq) -
                           wdm_response_db(sc.wdm_anchor);
  pr.snr_target_db = has_impairment(sc, "awgn")
                         ? frame_snr - tx.factor_db
                         : std::numeric_limits<double>::infinity();

  ComplexFrame ch = tx.frame;
  ch.center_offset = sc.if_center;  // where the analysis band sits after mixing
  const double tx_power = tx.frame.power();
  std::vector<double> pn_traj;
  double applied_offset = 0.0;
  for (const auto& imp : sc.impairments) {
    if (imp == "phase-noise") {
      if (sc.linewidth > 0.0) {
        LaserSpec laser;
        laser.lorentzian_linewidth = sc.linewidth;
        laser.freq_offset = 0.0;
        laser.seed = pr.seed;
        ch = apply_phase_noise(ch, laser, &pn_traj);
      }
    } else if (imp == "offset") {
      if (sc.freq_offset != 0.0)
        ch = apply_freq_offset(ch, sc.freq_offset, &applied_offset);
    } else if (imp == "saturation") {
      const double drive = sc.saturation_current / sc.photocurrent;
      ch = apply_saturation(ch, tx_power * drive * drive, sc.sat_knee);
    } else if (imp == "if-response") {
      IfResponse resp;
      resp.low_cut = sc.if_low_cut;
      resp.high_cut = sc.if_high_cut;
      ch = apply_if_response(ch, resp);
    } else if (imp == "awgn") {
      ch = apply_awgn(ch, frame_snr, sc.baud, pr.seed);
    } else if (imp == "low-freq-noise") {
      ch = apply_lowfreq_noise(ch, sc.lf_rel_db, sc.lf_corner, pr.seed);
    } else {
      throw config_error("unknown impairment '" + imp + "'");
    }
  }

  const std::vector<double> mf_taps = rrc_taps(sc.rolloff, sc.sps, sc.span_symbols);
  const double carrier = tx.info.carrier_hz;

  if (sc.recovery == "pilot") {
    const long b = strongest_bin(ch, sc.guard_band());
    const ComplexFrame rx = bin_shift(ch, -b);
    PilotFilterCfg pcfg;
    pcfg.bandwidth = sc.pilot_bw;
    pcfg.shape = (sc.pilot_shape == "gaussian") ? FilterShape::gaussian
                                                : FilterShape::brickwall;
    const ComplexFrame tone = extract_pilot(rx, pcfg, sc.guard_band());
    const double bin_hz = ch.sample_rate / static_cast<double>(ch.size());
    pr.phase_error_std = tone_phase_error_std(
        tone, pn_traj, applied_offset - static_cast<double>(b) * bin_hz);

    if (!tx.twin) {
      const ChainOut o = pilot_chain(rx, tone, carrier, sc, c, mf_taps, tx.ref1);
      pr.status = o.status;
      pr.ber = o.rec.ber;
      pr.errors = o.rec.errors;
      pr.bits = o.rec.bits;
      pr.wilson_lo = o.rec.wilson_lo;
      pr.wilson_hi = o.rec.wilson_hi;
      pr.snr_db = o.snr.snr_db;
      pr.evm_percent = o.snr.evm_percent;
    } else {
      const ChainOut o1 = pilot_chain(rx, tone, -carrier, sc, c, mf_taps, tx.ref1);
      const ChainOut o2 = pilot_chain(rx, tone, carrier, sc, c, mf_taps, tx.ref2);
      pr.status = (o1.status != PointStatus::ok) ? o1.status : o2.status;
      pr.ber_ch1 = (o1.status == PointStatus::ok) ? o1.rec.ber : 0.5;
      pr.ber_ch2 = (o2.status == PointStatus::ok) ? o2.rec.ber : 0.5;
      pr.errors = o1.rec.errors + o2.rec.errors;
      pr.bits = o1.rec.bits + o2.rec.bits;
      if (pr.status == PointStatus::ok) {
        pr.ber = static_cast<double>(pr.errors) / static_cast<double>(pr.bits);
        const auto w = wilson_interval(pr.errors, pr.bits);
        pr.wilson_lo = w.first;
        pr.wilson_hi = w.second;
        // joint error-vector SNR over both recovered channels
        const double p1 = std::pow(10.0, -o1.snr.snr_db / 10.0);
        const double p2 = std::pow(10.0, -o2.snr.snr_db / 10.0);
        pr.snr_db = -10.0 * std::log10((p1 + p2) / 2.0);
        pr.evm_percent = 100.0 * std::sqrt((p1 + p2) / 2.0);
      }
    }
  } else {
    const ChainOut o = bps_chain(ch, carrier, sc, c, mf_taps, tx.ref1);
    pr.status = o.status;
    pr.ber = o.rec.ber;
    pr.errors = o.rec.errors;
    pr.bits = o.rec.bits;
    pr.wilson_lo = o.rec.wilson_lo;
    pr.wilson_hi = o.rec.wilson_hi;
    pr.snr_db = o.snr.snr_db;
    pr.evm_percent = o.snr.evm_percent;
  }

  pr.exploratory = pr.bits < 100000;
  return pr;
}

}  // namespace

SweepResult run_scenario(const LinkScenario& sc, std::uint64_t master_seed) {
  validate_scenario(sc);
  const Constellation c = Constellation::qam16();
  SweepResult out;
  out.scenario_name = sc.name;
  out.axis = "";
  out.config_hash = config_hash(sc);
  out.master_seed = master_seed;
  const TxBundle tx = build_tx(sc, c, master_seed);
  out.points.push_back(run_one(sc, 0.0, 0, master_seed, tx, c));
  return out;
}

SweepResult run_sweep(const LinkScenario& sc, const SweepSpec& sweep,
                      std::uint64_t master_seed, int threads) {
  if (sweep.values.empty()) return run_scenario(sc, master_seed);
  validate_scenario(sc);
  // fail fast on any point that would be invalid, on this thread
  for (const double v : sweep.values) {
    LinkScenario pt = sc;
    apply_axis(pt, sweep.axis, v);
    validate_scenario(pt);
  }

  const Constellation c = Constellation::qam16();
  SweepResult out;
  out.scenario_name = sc.name;
  out.axis = sweep.axis;
  out.config_hash = config_hash(sc);
  out.master_seed = master_seed;
  out.points.resize(sweep.values.size());

  // the transmit frame is identical across points unless the axis reshapes it
  const bool tx_per_point =
      (sweep.axis == "ptspr_db" || sweep.axis == "channel_freq");
  std::unique_ptr<const TxBundle> shared_tx;
  if (!tx_per_point)
    shared_tx = std::make_unique<TxBundle>(build_tx(sc, c, master_seed));

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= sweep.values.size()) break;
      try {
        LinkScenario pt = sc;
        apply_axis(pt, sweep.axis, sweep.values[i]);
        const TxBundle* txp = shared_tx.get();
        TxBundle local;
        if (tx_per_point) {
          local = build_tx(pt, c, master_seed);
          txp = &local;
        }
        out.points[i] =
            run_one(pt, sweep.values[i], i, master_seed, *txp, c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  int n_threads = std::max(1, threads);
  n_threads = std::min<int>(n_threads, static_cast<int>(sweep.values.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::stable_sort(out.points.begin(), out.points.end(),
                   [](const PointResult& a, const PointResult& b) {
                     return a.axis_value < b.axis_value;
                   });
  return out;
}

}  // namespace bridgesim
