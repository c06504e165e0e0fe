#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "bridgesim/emit.hpp"
#include "bridgesim/engine.hpp"
#include "bridgesim/scenario.hpp"
#include "bridgesim/util.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bridgesim;

namespace {

// small frame so engine-level tests stay fast: 256-symbol period, 4 periods
LinkScenario small_scenario() {
  LinkScenario sc;
  sc.name = "unit";
  sc.payload_order = 8;
  sc.payload_periods = 4;
  sc.impairments = {"awgn"};
  sc.snr_at_ref = 30.0;
  sc.recovery = "pilot";
  sc.pilot_bw = 200e6;
  validate_scenario(sc);
  return sc;
}

bool same_point(const PointResult& a, const PointResult& b) {
  return a.axis_value == b.axis_value && a.seed == b.seed &&
         a.status == b.status && a.ber == b.ber && a.errors == b.errors &&
         a.bits == b.bits && a.snr_db == b.snr_db &&
         a.evm_percent == b.evm_percent && a.wilson_lo == b.wilson_lo &&
         a.wilson_hi == b.wilson_hi && a.ber_ch1 == b.ber_ch1 &&
         a.ber_ch2 == b.ber_ch2 && a.phase_error_std == b.phase_error_std &&
         ((a.snr_target_db == b.snr_target_db) ||
          (std::isinf(a.snr_target_db) && std::isinf(b.snr_target_db) &&
           a.snr_target_db * b.snr_target_db > 0)) &&
         a.exploratory == b.exploratory;
}

bool same_sweep(const SweepResult& a, const SweepResult& b) {
  if (a.scenario_name != b.scenario_name || a.axis != b.axis ||
      a.config_hash != b.config_hash || a.master_seed != b.master_seed ||
      a.points.size() != b.points.size())
    return false;
  for (std::size_t i = 0; i < a.points.size(); ++i)
    if (!same_point(a.points[i], b.points[i])) return false;
  return true;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("scenario text round-trips exactly and hashes canonically") {
  const LinkScenario sc = small_scenario();
  const std::string text = serialize_scenario(sc);
  const LinkScenario back = parse_scenario(text);
  CHECK(serialize_scenario(back) == text);
  CHECK(config_hash(back) == config_hash(sc));

  // the hash tracks every field
  LinkScenario mutated = sc;
  mutated.ptspr_db = -10.5;
  CHECK(config_hash(mutated) != config_hash(sc));
  LinkScenario renamed = sc;
  renamed.name = "unit2";
  CHECK(config_hash(renamed) != config_hash(sc));

  // comments and blank lines are fine, unknown keys are not
  CHECK_NOTHROW((void)parse_scenario("# comment\n\n" + text));
  CHECK_THROWS_AS((void)parse_scenario(text + "\nnot_a_key = 1\n"),
                  config_error);
}

TEST_CASE("scenario validation names bad configurations") {
  LinkScenario sc = small_scenario();
  CHECK_NOTHROW(validate_scenario(sc));

  LinkScenario bad = sc;
  bad.sps = 5;
  CHECK_THROWS_AS(validate_scenario(bad), config_error);
  bad = sc;
  bad.pilot_bw = 1.2e9;  // does not fit inside the 0.5 GHz guard
  CHECK_THROWS_AS(validate_scenario(bad), config_error);
  bad = sc;
  bad.waveform = "twin-ssb";
  bad.upconversion = 2.875e9;
  bad.recovery = "bps";
  CHECK_THROWS_AS(validate_scenario(bad), config_error);
  bad = sc;
  bad.sweep_axis = "bogus";
  bad.sweep_step = 1.0;
  bad.sweep_stop = 1.0;
  CHECK_THROWS_AS(validate_scenario(bad), config_error);
  bad = sc;
  bad.bias_phase = pi / 3.0;
  CHECK_THROWS_AS(validate_scenario(bad), config_error);
  bad = sc;
  bad.impairments = {"awgn", "awgn"};
  CHECK_THROWS_AS(validate_scenario(bad), config_error);
  bad = sc;
  bad.impairments = {"gremlins"};
  CHECK_THROWS_AS(validate_scenario(bad), config_error);
}

TEST_CASE("sweep argument parsing is inclusive of both ends") {
  const SweepSpec spec = parse_sweep_arg("photocurrent=1:2:0.5");
  CHECK(spec.axis == "photocurrent");
  REQUIRE(spec.values.size() == 3);
  CHECK(spec.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spec.values[1] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(spec.values[2] == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS((void)parse_sweep_arg("photocurrent=1:2"), config_error);
  CHECK_THROWS_AS((void)parse_sweep_arg("volume=1:2:0.5"), config_error);
  CHECK_THROWS_AS((void)parse_sweep_arg("ptspr_db=1:2:0"), config_error);
  CHECK_THROWS_AS((void)parse_sweep_arg("ptspr_db=2:1:0.5"), config_error);
  CHECK_THROWS_AS((void)parse_sweep_arg("ptspr_db=a:b:c"), config_error);
}

TEST_CASE("single run: clean high-SNR point decodes and books the SNR target") {
  const LinkScenario sc = small_scenario();
  const SweepResult res = run_scenario(sc, 42);
  CHECK(res.scenario_name == "unit");
  CHECK(res.axis.empty());
  CHECK(res.config_hash == config_hash(sc));
  CHECK(res.master_seed == 42);
  REQUIRE(res.points.size() == 1);

  const PointResult& p = res.points[0];
  CHECK(p.status == PointStatus::ok);
  CHECK(p.ber == 0.0);
  CHECK(p.errors == 0);
  CHECK(p.bits == sc.frame_symbols() * 4);
  CHECK(p.exploratory);  // 4096 counted bits is a smoke run, not a measurement
  CHECK(p.snr_db > 25.0);

  // per-channel data Es/N0: frame SNR minus the pilot's share of the power
  const double factor = 10.0 * std::log10(1.0 + db_to_lin(sc.ptspr_db));
  CHECK(p.snr_target_db ==
        doctest::Approx(sc.snr_at_ref - factor).epsilon(1e-12));

  // without the noise stage the target is the +inf flag
  LinkScenario clean = sc;
  clean.impairments = {};
  const SweepResult res2 = run_scenario(clean, 42);
  CHECK(std::isinf(res2.points[0].snr_target_db));
  CHECK(res2.points[0].snr_target_db > 0.0);
}

TEST_CASE("sweeps are bit-identical across thread counts and reruns") {
  LinkScenario sc = small_scenario();
  sc.snr_at_ref = 18.0;  // low enough that the noise realization matters
  const SweepSpec spec = parse_sweep_arg("photocurrent=2.0:2.6:0.3");

  const SweepResult t1 = run_sweep(sc, spec, 7, 1);
  const SweepResult t2 = run_sweep(sc, spec, 7, 2);
  const SweepResult t3 = run_sweep(sc, spec, 7, 3);
  const SweepResult again = run_sweep(sc, spec, 7, 2);
  CHECK(same_sweep(t1, t2));
  CHECK(same_sweep(t1, t3));
  CHECK(same_sweep(t1, again));

  REQUIRE(t1.points.size() == 3);
  for (std::size_t i = 0; i + 1 < t1.points.size(); ++i)
    CHECK(t1.points[i].axis_value < t1.points[i + 1].axis_value);

  // the photocurrent axis moves the booked data Es/N0 by 20 dB per decade
  const double factor = 10.0 * std::log10(1.0 + db_to_lin(sc.ptspr_db));
  for (const auto& p : t1.points) {
    const double want = sc.snr_at_ref +
                        20.0 * std::log10(p.axis_value * 1e-3 /
                                          sc.ref_photocurrent) -
                        factor;
    CHECK(p.snr_target_db == doctest::Approx(want).epsilon(1e-12));
  }

  // a different master seed is a different experiment
  const SweepResult other = run_sweep(sc, spec, 8, 2);
  CHECK(!same_sweep(t1, other));

  // an empty sweep spec degrades to the single-point run
  const SweepResult single = run_sweep(sc, SweepSpec{}, 7, 2);
  const SweepResult direct = run_scenario(sc, 7);
  CHECK(same_sweep(single, direct));

  // a one-value sweep is a plain probe of that axis point
  SweepSpec one;
  one.axis = "photocurrent";
  one.values = {2.3};
  const SweepResult probe = run_sweep(sc, one, 7, 1);
  REQUIRE(probe.points.size() == 1);
  CHECK(probe.axis == "photocurrent");
  CHECK(probe.points[0].axis_value == 2.3);
  CHECK(probe.points[0].status == PointStatus::ok);
}

TEST_CASE("results emit deterministically and load back unchanged") {
  LinkScenario sc = small_scenario();
  sc.snr_at_ref = 18.0;
  const SweepSpec spec = parse_sweep_arg("photocurrent=2.0:2.6:0.3");
  const SweepResult res = run_sweep(sc, spec, 7, 2);

  const std::string json_a = emit_results(res, "/tmp/bridgesim-test-emit-a");
  const SweepResult back = load_sweep_result(json_a);
  CHECK(same_sweep(res, back));

  // byte-identical re-emission, including the sidecar files
  const std::string json_b = emit_results(res, "/tmp/bridgesim-test-emit-b");
  CHECK(slurp(json_a) == slurp(json_b));
  const std::string csv_a = json_a.substr(0, json_a.size() - 5) + ".csv";
  const std::string csv_b = json_b.substr(0, json_b.size() - 5) + ".csv";
  CHECK(slurp(csv_a) == slurp(csv_b));
  const std::string man_a =
      json_a.substr(0, json_a.size() - 5) + ".manifest.json";
  CHECK(!slurp(man_a).empty());

  // the +inf SNR flag survives the JSON null convention
  LinkScenario clean = sc;
  clean.impairments = {};
  const SweepResult res2 = run_scenario(clean, 7);
  const std::string json_c = emit_results(res2, "/tmp/bridgesim-test-emit-c");
  const SweepResult back2 = load_sweep_result(json_c);
  REQUIRE(back2.points.size() == 1);
  CHECK(std::isinf(back2.points[0].snr_target_db));
  CHECK(back2.points[0].snr_target_db > 0.0);
  CHECK(slurp(json_c) == slurp(emit_results(res2, "/tmp/bridgesim-test-emit-d")));
}
