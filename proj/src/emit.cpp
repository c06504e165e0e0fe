#include "bridgesim/emit.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "json.hpp"

namespace bridgesim {

namespace {

using nlohmann::json;

std::string hash_hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t hash_from_hex(const std::string& s) {
  try {
    return std::stoull(s, nullptr, 16);
  } catch (const std::exception&) {
    throw config_error("results: bad config_hash '" + s + "'");
  }
}

// JSON has no inf, so non-finite values are stored as null and read back as
// +inf (the only non-finite value the engine produces, for noise-off runs)
json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

double num_back(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

std::string fmt_csv(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

std::string safe_name(const std::string& name) {
  std::string out = name;
  for (auto& ch : out)
    if (ch == '/' || ch == '\\' || ch == ' ') ch = '_';
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("results: cannot write '" + path + "'");
  out.write(text.data(), static_cast<long>(text.size()));
}

}  // namespace

std::string emit_results(const SweepResult& result, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string base =
      (std::filesystem::path(out_dir) / safe_name(result.scenario_name)).string();

  json root;
  root["schema_version"] = result_schema_version;
  root["tool"] = tool_name;
  root["tool_version"] = tool_version;
  root["scenario_name"] = result.scenario_name;
  root["axis"] = result.axis;
  root["config_hash"] = hash_hex(result.config_hash);
  root["master_seed"] = result.master_seed;
  json pts = json::array();
  for (const auto& p : result.points) {
    json row;
    row["axis_value"] = num(p.axis_value);
    row["seed"] = p.seed;
    row["status"] = to_string(p.status);
    row["ber"] = num(p.ber);
    row["errors"] = p.errors;
    row["bits"] = p.bits;
    row["snr_db"] = num(p.snr_db);
    row["evm_percent"] = num(p.evm_percent);
    row["wilson_lo"] = num(p.wilson_lo);
    row["wilson_hi"] = num(p.wilson_hi);
    row["ber_ch1"] = num(p.ber_ch1);
    row["ber_ch2"] = num(p.ber_ch2);
    row["phase_error_std"] = num(p.phase_error_std);
    row["snr_target_db"] = num(p.snr_target_db);
    row["exploratory"] = p.exploratory;
    pts.push_back(std::move(row));
  }
  root["points"] = std::move(pts);
  write_file(base + ".json", root.dump(2) + "\n");

  std::string csv =
      "axis_value,seed,status,ber,errors,bits,snr_db,evm_percent,"
      "wilson_lo,wilson_hi,ber_ch1,ber_ch2,phase_error_std,snr_target_db,"
      "exploratory\n";
  for (const auto& p : result.points) {
    csv += fmt_csv(p.axis_value);
    csv += ",";
    csv += std::to_string(p.seed);
    csv += ",";
    csv += to_string(p.status);
    csv += ",";
    csv += fmt_csv(p.ber);
    csv += ",";
    csv += std::to_string(p.errors);
    csv += ",";
    csv += std::to_string(p.bits);
    csv += ",";
    csv += fmt_csv(p.snr_db);
    csv += ",";
    csv += fmt_csv(p.evm_percent);
    csv += ",";
    csv += fmt_csv(p.wilson_lo);
    csv += ",";
    csv += fmt_csv(p.wilson_hi);
    csv += ",";
    csv += fmt_csv(p.ber_ch1);
    csv += ",";
    csv += fmt_csv(p.ber_ch2);
    csv += ",";
    csv += fmt_csv(p.phase_error_std);
    csv += ",";
    csv += fmt_csv(p.snr_target_db);
    csv += ",";
    csv += p.exploratory ? "1" : "0";
    csv += "\n";
  }
  write_file(base + ".csv", csv);

  json man;
  man["tool"] = tool_name;
  man["tool_version"] = tool_version;
  man["schema_version"] = result_schema_version;
  man["scenario_name"] = result.scenario_name;
  man["axis"] = result.axis;
  man["config_hash"] = hash_hex(result.config_hash);
  man["master_seed"] = result.master_seed;
  man["n_points"] = result.points.size();
  write_file(base + ".manifest.json", man.dump(2) + "\n");

  return base + ".json";
}

SweepResult load_sweep_result(const std::string& json_path) {
  std::ifstream in(json_path, std::ios::binary);
  if (!in) throw config_error("results: cannot open '" + json_path + "'");
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    throw config_error("results: bad JSON in '" + json_path + "': " + e.what());
  }
  SweepResult out;
  try {
    if (root.at("schema_version").get<int>() != result_schema_version)
      throw config_error("results: unsupported schema_version");
    out.scenario_name = root.at("scenario_name").get<std::string>();
    out.axis = root.at("axis").get<std::string>();
    out.config_hash = hash_from_hex(root.at("config_hash").get<std::string>());
    out.master_seed = root.at("master_seed").get<std::uint64_t>();
    for (const auto& row : root.at("points")) {
      PointResult p;
      p.axis_value = num_back(row.at("axis_value"));
      p.seed = row.at("seed").get<std::uint64_t>();
      p.status = point_status_from_string(row.at("status").get<std::string>());
      p.ber = num_back(row.at("ber"));
      p.errors = row.at("errors").get<std::uint64_t>();
      p.bits = row.at("bits").get<std::uint64_t>();
      p.snr_db = num_back(row.at("snr_db"));
      p.evm_percent = num_back(row.at("evm_percent"));
      p.wilson_lo = num_back(row.at("wilson_lo"));
      p.wilson_hi = num_back(row.at("wilson_hi"));
      p.ber_ch1 = num_back(row.at("ber_ch1"));
      p.ber_ch2 = num_back(row.at("ber_ch2"));
      p.phase_error_std = num_back(row.at("phase_error_std"));
      p.snr_target_db = num_back(row.at("snr_target_db"));
      p.exploratory = row.at("exploratory").get<bool>();
      out.points.push_back(p);
    }
  } catch (const json::exception& e) {
    throw config_error("results: missing field in '" + json_path + "': " +
                       e.what());
  }
  return out;
}

}  // namespace bridgesim
