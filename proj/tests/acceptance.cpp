#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bridgesim/channel.hpp"
#include "bridgesim/emit.hpp"
#include "bridgesim/engine.hpp"
#include "bridgesim/metrics.hpp"
#include "bridgesim/scenario.hpp"
#include "bridgesim/sigcore.hpp"
#include "bridgesim/txdsp.hpp"
#include "bridgesim/util.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bridgesim;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// one verdict line per criterion, checked so ctest gates on it
void report(int crit, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", crit,
              detail.c_str());
  std::fflush(stdout);
  CHECK(pass);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

LinkScenario load_scn(const std::string& name) {
  return load_scenario(std::string(BRIDGESIM_SCENARIO_DIR) + "/" + name +
                       ".scn");
}

// three independent realizations of a canonical sweep, memoized per scenario
const std::vector<SweepResult>& seeded_sweeps(const std::string& name) {
  static std::map<std::string, std::vector<SweepResult>> cache;
  const auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  const LinkScenario sc = load_scn(name);
  std::vector<SweepResult> runs;
  for (std::uint64_t seed : {1, 2, 3})
    runs.push_back(run_sweep(sc, default_sweep(sc), seed, 1));
  return cache.emplace(name, std::move(runs)).first->second;
}

BerCurve to_curve(const SweepResult& r) {
  BerCurve c;
  for (const auto& p : r.points) {
    c.x_db.push_back(20.0 * std::log10(p.axis_value));
    c.ber.push_back(p.ber);
  }
  return c;
}

// per-seed FEC-threshold penalties of scenario a over scenario b
std::optional<std::vector<double>> seed_penalties(const std::string& a,
                                                  const std::string& b) {
  const auto& ra = seeded_sweeps(a);
  const auto& rb = seeded_sweeps(b);
  std::vector<double> out;
  for (std::size_t s = 0; s < ra.size(); ++s) {
    const auto p = penalty_db(to_curve(ra[s]), to_curve(rb[s]), hd_fec_limit);
    if (!p) return std::nullopt;
    out.push_back(*p);
  }
  return out;
}

double mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

bool all_ok(const SweepResult& r) {
  for (const auto& p : r.points)
    if (p.status != PointStatus::ok) return false;
  return true;
}

// interior maximum of snr_db, monotone on both flanks within tol_db
bool unimodal_interior_max(const SweepResult& r, double tol_db,
                           std::size_t* argmax) {
  const auto& pts = r.points;
  std::size_t m = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].snr_db > pts[m].snr_db) m = i;
  *argmax = m;
  if (m == 0 || m + 1 == pts.size()) return false;
  for (std::size_t i = 0; i < m; ++i)
    if (pts[i + 1].snr_db < pts[i].snr_db - tol_db) return false;
  for (std::size_t i = m; i + 1 < pts.size(); ++i)
    if (pts[i + 1].snr_db > pts[i].snr_db + tol_db) return false;
  return true;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double dc_bin_ptspr_db(const ComplexFrame& f) {
  cplx m(0.0, 0.0);
  for (const auto& s : f.samples) m += s;
  m /= static_cast<double>(f.size());
  const double p_pilot = std::norm(m);
  return 10.0 * std::log10(p_pilot / (f.power() - p_pilot));
}

double mirror_rejection_db(const ComplexFrame& f, double band_center,
                           double half) {
  const Psd psd = power_spectrum(f, 1);
  const double sig = psd.band_power(band_center - half, band_center + half);
  const double img = psd.band_power(-band_center - half, -band_center + half);
  return 10.0 * std::log10(sig / img);
}

}  // namespace

TEST_CASE("criterion 1: awgn backbone matches analytic qam16") {
  const auto t0 = clock_type::now();
  LinkScenario sc = load_scn("fig6-ecl-pilot");
  sc.name = "awgn-backbone";
  sc.impairments = {"awgn"};
  sc.linewidth = 0.0;
  sc.freq_offset = 0.0;
  sc.ptspr_db = 0.0;  // strong clean tone so recovery adds no penalty
  sc.pilot_bw = 20e6;
  sc.payload_periods = 25;  // 204800 counted bits per point
  sc.photocurrent = sc.ref_photocurrent;
  sc.sweep_axis.clear();
  // slow the equalizer adaptation so its excess MSE stays well under the
  // 3 sigma window this check needs; convergence still takes < 1 epoch
  sc.eq_step_rde = 1e-4;
  sc.eq_step_dd = 5e-5;

  bool pass = true;
  std::string detail;
  const double share = 10.0 * std::log10(1.0 + db_to_lin(sc.ptspr_db));
  const double es_list[] = {12.0, 14.0, 16.0};
  for (int i = 0; i < 3; ++i) {
    sc.snr_at_ref = es_list[i] + share;  // frame SNR carrying that data Es/N0
    validate_scenario(sc);
    const SweepResult r = run_scenario(sc, 101 + static_cast<std::uint64_t>(i));
    const PointResult& p = r.points.at(0);
    const double want = oracle::qam16_ber(es_list[i]);
    const double sigma =
        std::sqrt(static_cast<double>(p.bits) * want * (1.0 - want));
    const double z = (static_cast<double>(p.errors) -
                      want * static_cast<double>(p.bits)) /
                     sigma;
    pass = pass && p.status == PointStatus::ok && p.bits >= 200000 &&
           std::abs(z) <= 3.0;
    detail += fmt("%g dB: ber %.3e vs %.3e (z %+.2f); ", es_list[i], p.ber,
                  want, z);
  }
  const double dt = seconds_since(t0);
  pass = pass && dt < 30.0;
  report(1, pass, detail + fmt("%.1f s (< 30 s)", dt));
}

TEST_CASE("criterion 2: narrow-line tone vs blind penalty") {
  const auto t0 = clock_type::now();
  const auto pens = seed_penalties("fig6-ecl-pilot", "fig6-ecl-bps");
  const double dt = seconds_since(t0);
  if (!pens) {
    report(2, false, "a seed's curve never crosses the FEC threshold");
    return;
  }
  const double m = mean(*pens);
  const bool pass = m <= 0.2 && dt < 180.0;
  report(2, pass,
         fmt("mean penalty %.3f dB (seeds %.3f/%.3f/%.3f), bound <= 0.2 dB; "
             "linewidth-symbol product 1.34e-5; %.1f s (< 180 s)",
             m, (*pens)[0], (*pens)[1], (*pens)[2], dt));
}

TEST_CASE("criterion 3: wide-line tone vs blind penalty") {
  const auto pens = seed_penalties("fig6-dfb-pilot", "fig6-dfb-bps");
  if (!pens) {
    report(3, false, "a seed's curve never crosses the FEC threshold");
    return;
  }
  const double m = mean(*pens);
  const bool pass = m >= 0.0 && m <= 0.8;
  report(3, pass,
         fmt("mean penalty %.3f dB (seeds %.3f/%.3f/%.3f), window [0, 0.8] dB",
             m, (*pens)[0], (*pens)[1], (*pens)[2]));
}

TEST_CASE("criterion 4: wide-line vs narrow-line tone penalty") {
  const auto pens = seed_penalties("fig6-dfb-pilot", "fig6-ecl-pilot");
  if (!pens) {
    report(4, false, "a seed's curve never crosses the FEC threshold");
    return;
  }
  const double m = mean(*pens);
  const bool pass = m >= 0.2 && m <= 1.5;
  report(4, pass,
         fmt("mean penalty %.3f dB (seeds %.3f/%.3f/%.3f), window [0.2, 1.5] "
             "dB, each receiver at its own tone filter",
             m, (*pens)[0], (*pens)[1], (*pens)[2]));
}

TEST_CASE("criterion 5: ptspr sweep unimodality and phase error") {
  LinkScenario wide = load_scn("fig6b-ptspr");  // 359 kHz
  LinkScenario narrow = wide;
  narrow.name = "fig6b-narrow";
  narrow.linewidth = 67e3;
  narrow.pilot_bw = 50e6;
  validate_scenario(narrow);

  const SweepResult rw = run_sweep(wide, default_sweep(wide), 1, 1);
  const SweepResult rn = run_sweep(narrow, default_sweep(narrow), 1, 1);

  std::size_t mw = 0, mn = 0;
  const bool ok_w = all_ok(rw) && unimodal_interior_max(rw, 0.15, &mw);
  const bool ok_n = all_ok(rn) && unimodal_interior_max(rn, 0.15, &mn);
  const double std_at_opt = rw.points[mw].phase_error_std;
  const bool pass = ok_w && ok_n && std_at_opt > 0.0 && std_at_opt < 0.05;
  report(5, pass,
         fmt("359 kHz: %s, max at %g dB, phase std %.4f rad (< 0.05); "
             "67 kHz: %s, max at %g dB",
             ok_w ? "unimodal interior" : "NOT unimodal/interior",
             rw.points[mw].axis_value, std_at_opt,
             ok_n ? "unimodal interior" : "NOT unimodal/interior",
             rn.points[mn].axis_value));
}

TEST_CASE("criterion 6: linewidth estimator recovery") {
  ComplexFrame carrier;
  carrier.sample_rate = 50e9;
  carrier.samples.assign(500000, cplx(1.0, 0.0));  // 10 us

  bool pass = true;
  std::string detail;
  for (double lw : {67e3, 359e3}) {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      LaserSpec laser;
      laser.lorentzian_linewidth = lw;
      laser.seed = seed;
      const FmNoisePsd psd = fm_noise_spectrum(apply_phase_noise(carrier, laser));
      worst = std::max(worst, std::abs(psd.linewidth - lw) / lw);
    }
    pass = pass && worst <= 0.10;
    detail += fmt("%g kHz: worst of 50 seeds %+.1f%%; ", lw / 1e3, 100.0 * worst);
  }
  report(6, pass, detail + "bound +-10%");
}

TEST_CASE("criterion 7: lens antenna gain budget") {
  const double g = antenna_gain_db(0.05, 250e9);
  const double pair = 2.0 * g;
  const double nominal_pair = 42.0 + 42.0;
  const bool single_ok = g >= 42.1 && g <= 42.5;
  const bool additivity_ok = nominal_pair >= 83.6 && nominal_pair <= 84.4;
  report(7, single_ok && additivity_ok,
         fmt("5 cm lens at 250 GHz: %.3f dB (window 42.3 +- 0.2); two nominal "
             "42 dB antennas total %.1f dB (window 84 +- 0.4); computed pair "
             "2x%.3f = %.3f dB shows the rounding gap",
             g, nominal_pair, g, pair));
}

TEST_CASE("criterion 8: twin-sideband 40 gbit link") {
  const LinkScenario sc = load_scn("fig10-twinssb");
  const double span = 2.0 * sc.upconversion + sc.signal_bandwidth();
  const double gross = 2.0 * sc.baud * 4.0;
  const bool arith_ok = std::abs(span - 11.25e9) < 1.0 && gross == 40e9;

  const SweepResult r = run_sweep(sc, default_sweep(sc), 1, 1);
  const auto& pts = r.points;
  std::size_t m = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].ber < pts[m].ber) m = i;
  const bool interior_min = all_ok(r) && m > 0 && m + 1 < pts.size() &&
                            pts.front().ber > pts[m].ber &&
                            pts.back().ber > pts[m].ber;
  const bool both_under = pts[m].ber_ch1 < hd_fec_limit &&
                          pts[m].ber_ch2 < hd_fec_limit;

  // per-channel threshold crossings on the downward branch
  BerCurve c1, c2;
  for (std::size_t i = 0; i <= m; ++i) {
    c1.x_db.push_back(20.0 * std::log10(pts[i].axis_value));
    c1.ber.push_back(pts[i].ber_ch1);
    c2.x_db.push_back(20.0 * std::log10(pts[i].axis_value));
    c2.ber.push_back(pts[i].ber_ch2);
  }
  const auto pen = penalty_db(c1, c2, hd_fec_limit);
  const bool low_if_worse = pen.has_value() && *pen > 0.0;

  report(8, arith_ok && interior_min && both_under && low_if_worse,
         fmt("span %.2f GHz, gross %g Gbit/s; total-BER min interior at "
             "%.1f mA (%.2e), ch1 %.2e / ch2 %.2e both < 3.8e-3; low-IF "
             "channel penalty %+.2f dB > 0",
             span / 1e9, gross / 1e9, pts[m].axis_value, pts[m].ber,
             pts[m].ber_ch1, pts[m].ber_ch2, pen ? *pen : -99.0));
}

TEST_CASE("criterion 9: comb grid penalty ordering") {
  const LinkScenario sc = load_scn("fig8-wdm");
  const SweepResult r = run_sweep(sc, default_sweep(sc), 1, 1);
  const auto& pts = r.points;

  std::vector<double> ber, loss;
  std::string list;
  for (const auto& p : pts) {
    ber.push_back(p.ber);
    loss.push_back(-wdm_response_db(p.axis_value * 1e9));
    list += fmt("%.2f:%.1e ", p.axis_value, p.ber);
  }
  const double rho = oracle::spearman(ber, loss);
  const bool pass = all_ok(r) && pts.size() == 5 && rho == 1.0;
  report(9, pass,
         fmt("5 carriers (GHz:BER) %srank correlation vs band roll-off %.0f",
             list.c_str(), rho));
}

TEST_CASE("criterion 10: ptspr realization and image rejection") {
  const Constellation c = Constellation::qam16();
  const SymbolStream pl1 = build_payload(11, 2, 1, c);
  const SymbolStream pl2 = build_payload(11, 2, 2, c);
  const SymbolStream silent;

  double worst_dev = 0.0;
  double min_rej = 1e9;
  for (int p = -25; p <= 5; ++p) {
    SsbConfig scfg;
    scfg.ptspr_db = p;
    SsbFrameInfo info;
    const ComplexFrame f = make_ssb_with_pilot(pl1, scfg, &info);
    const double half = scfg.signal_bandwidth() / 2.0;
    worst_dev = std::max(worst_dev, std::abs(dc_bin_ptspr_db(f) - p));
    min_rej = std::min(min_rej, mirror_rejection_db(f, info.carrier_hz, half));

    TwinSsbConfig tcfg;
    tcfg.ptspr_db = p;
    SsbFrameInfo tinfo;
    const ComplexFrame both = make_twin_ssb(pl1, pl2, tcfg, &tinfo);
    worst_dev = std::max(worst_dev, std::abs(dc_bin_ptspr_db(both) - p));
    const ComplexFrame lo = make_twin_ssb(pl1, silent, tcfg);
    const ComplexFrame hi = make_twin_ssb(silent, pl2, tcfg);
    min_rej =
        std::min(min_rej, mirror_rejection_db(lo, -tinfo.carrier_hz, half));
    min_rej =
        std::min(min_rej, mirror_rejection_db(hi, tinfo.carrier_hz, half));
  }
  const bool pass = worst_dev <= 0.1 && min_rej >= 40.0;
  report(10, pass,
         fmt("over [-25, +5] dB: worst PTSPR deviation %.3f dB (<= 0.1), "
             "worst image rejection %.1f dB (>= 40)",
             worst_dev, min_rej));
}

TEST_CASE("criterion 11: bit-identical reruns across thread counts") {
  const LinkScenario sc = load_scn("fig8-wdm");
  const SweepSpec spec = default_sweep(sc);
  const SweepResult r1 = run_sweep(sc, spec, 1, 1);
  const SweepResult r4 = run_sweep(sc, spec, 1, 4);
  const SweepResult r4b = run_sweep(sc, spec, 1, 4);

  const std::string ja = slurp(emit_results(r1, "/tmp/bridgesim-acc-t1"));
  const std::string jb = slurp(emit_results(r4, "/tmp/bridgesim-acc-t4"));
  const std::string jc = slurp(emit_results(r4b, "/tmp/bridgesim-acc-t4b"));
  const bool pass = !ja.empty() && ja == jb && ja == jc;
  report(11, pass,
         fmt("threads 1 vs 4 vs rerun: %zu-byte reports %s", ja.size(),
             pass ? "byte-identical" : "DIFFER"));
}
