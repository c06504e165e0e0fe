// bridgesim command line front end
//
//   bridgesim run <scenario> [--sweep axis=start:stop:step] [--seed N]
//                            [--out DIR] [--points-bits N] [--threads N]
//   bridgesim list-scenarios [--dir DIR]
//   bridgesim validate <scenario>
//
// <scenario> is a file path, or a bare name resolved against --dir, the
// BRIDGESIM_SCENARIOS environment variable, or the build-time default.
// Results go to --out, else $BRIDGESIM_OUT, else ./results. Exit code 0 on
// success; on failure a one-line JSON error report goes to stderr.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bridgesim/emit.hpp"
#include "bridgesim/engine.hpp"
#include "bridgesim/scenario.hpp"

namespace {

namespace fs = std::filesystem;
using bridgesim::config_error;

#ifndef BRIDGESIM_DEFAULT_SCENARIO_DIR
#define BRIDGESIM_DEFAULT_SCENARIO_DIR "scenarios"
#endif

std::string scenario_dir(const std::string& cli_dir) {
  if (!cli_dir.empty()) return cli_dir;
  if (const char* env = std::getenv("BRIDGESIM_SCENARIOS"); env && *env)
    return env;
  return BRIDGESIM_DEFAULT_SCENARIO_DIR;
}

std::string output_dir(const std::string& cli_out) {
  if (!cli_out.empty()) return cli_out;
  if (const char* env = std::getenv("BRIDGESIM_OUT"); env && *env) return env;
  return "results";
}

std::string resolve_scenario(const std::string& arg, const std::string& dir) {
  if (fs::exists(arg)) return arg;
  const fs::path base = fs::path(dir) / arg;
  if (fs::exists(base)) return base.string();
  const fs::path with_ext = fs::path(dir) / (arg + ".scn");
  if (fs::exists(with_ext)) return with_ext.string();
  throw config_error("scenario '" + arg + "' not found (searched " + dir + ")");
}

int fail(const std::string& type, const std::string& message) {
  nlohmann::json err;
  err["error"]["type"] = type;
  err["error"]["message"] = message;
  std::fprintf(stderr, "%s\n", err.dump().c_str());
  return type == "config" ? 2 : 1;
}

void print_points(const bridgesim::SweepResult& res) {
  std::printf("# %-12s %-12s %-10s %-8s %-8s %s\n", "axis", "ber", "snr_db",
              "errors", "bits", "status");
  for (const auto& p : res.points) {
    char axis[32];
    std::snprintf(axis, sizeof(axis), "%.6g", p.axis_value);
    char ber[32];
    std::snprintf(ber, sizeof(ber), "%.3e", p.ber);
    char snr[32];
    std::snprintf(snr, sizeof(snr), "%.2f", p.snr_db);
    std::printf("  %-12s %-12s %-10s %-8llu %-8llu %s\n", axis, ber, snr,
                static_cast<unsigned long long>(p.errors),
                static_cast<unsigned long long>(p.bits),
                bridgesim::to_string(p.status).c_str());
  }
}

int cmd_run(const std::string& scenario_arg, const std::string& dir,
            const std::string& sweep_arg, bool seed_set, std::uint64_t seed,
            const std::string& out_arg, long long points_bits, int threads) {
  const std::string path = resolve_scenario(scenario_arg, scenario_dir(dir));
  bridgesim::LinkScenario sc = bridgesim::load_scenario(path);
  if (points_bits > 0) {
    const double per_period =
        static_cast<double>(sc.period_symbols()) * 4.0;  // bits per payload period
    sc.payload_periods = std::max(
        1, static_cast<int>(std::llround(static_cast<double>(points_bits) / per_period)));
  }
  bridgesim::validate_scenario(sc);
  const std::uint64_t master = seed_set ? seed : sc.seed;
  const bridgesim::SweepSpec sweep = sweep_arg.empty()
                                         ? bridgesim::default_sweep(sc)
                                         : bridgesim::parse_sweep_arg(sweep_arg);
  const bridgesim::SweepResult res =
      bridgesim::run_sweep(sc, sweep, master, threads);
  const std::string json_path = emit_results(res, output_dir(out_arg));
  std::printf("%s: %zu point%s%s%s\n", res.scenario_name.c_str(),
              res.points.size(), res.points.size() == 1 ? "" : "s",
              res.axis.empty() ? "" : " over ",
              res.axis.empty() ? "" : res.axis.c_str());
  print_points(res);
  std::printf("wrote %s\n", json_path.c_str());
  return 0;
}

int cmd_list(const std::string& dir) {
  const std::string d = scenario_dir(dir);
  if (!fs::is_directory(d))
    throw config_error("scenario directory '" + d + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(d))
    if (entry.path().extension() == ".scn") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      const auto sc = bridgesim::load_scenario(f.string());
      bridgesim::validate_scenario(sc);
      std::printf("%-18s %-9s %-6s %s\n", sc.name.c_str(), sc.waveform.c_str(),
                  sc.recovery.c_str(),
                  sc.sweep_axis.empty() ? "single point"
                                        : ("sweep " + sc.sweep_axis).c_str());
    } catch (const std::exception& e) {
      std::printf("%-18s INVALID: %s\n", f.filename().string().c_str(), e.what());
    }
  }
  return 0;
}

int cmd_validate(const std::string& scenario_arg, const std::string& dir) {
  const std::string path = resolve_scenario(scenario_arg, scenario_dir(dir));
  const auto sc = bridgesim::load_scenario(path);
  bridgesim::validate_scenario(sc);
  std::printf("%s: ok (config %016llx)\n", sc.name.c_str(),
              static_cast<unsigned long long>(bridgesim::config_hash(sc)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"photonic wireless bridge link simulator"};
  app.set_version_flag("--version", bridgesim::tool_version);
  app.require_subcommand(1);

  std::string scenario_arg, sweep_arg, out_arg, dir_arg;
  std::uint64_t seed = 0;
  long long points_bits = 0;
  int threads = 1;

  auto* run = app.add_subcommand("run", "run a scenario or sweep");
  run->add_option("scenario", scenario_arg, "scenario file or name")->required();
  run->add_option("--sweep", sweep_arg, "axis=start:stop:step, overrides the file");
  auto* seed_opt = run->add_option("--seed", seed, "master seed override");
  run->add_option("--out", out_arg, "output directory (default $BRIDGESIM_OUT)");
  run->add_option("--points-bits", points_bits,
                  "approximate payload bits per point");
  run->add_option("--threads", threads, "worker threads for sweep points")
      ->check(CLI::Range(1, 64));
  run->add_option("--dir", dir_arg, "scenario directory");

  auto* list = app.add_subcommand("list-scenarios", "list known scenarios");
  list->add_option("--dir", dir_arg, "scenario directory");

  auto* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("scenario", scenario_arg, "scenario file or name")
      ->required();
  validate->add_option("--dir", dir_arg, "scenario directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(scenario_arg, dir_arg, sweep_arg, seed_opt->count() > 0,
                     seed, out_arg, points_bits, threads);
    if (list->parsed()) return cmd_list(dir_arg);
    if (validate->parsed()) return cmd_validate(scenario_arg, dir_arg);
  } catch (const config_error& e) {
    return fail("config", e.what());
  } catch (const std::exception& e) {
    return fail("runtime", e.what());
  }
  return 0;
}
