#include "bridgesim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bridgesim {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("scenario: bad number for '" + key + "': " + v);
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 1e9)
    throw config_error("scenario: '" + key + "' must be an integer");
  return static_cast<int>(x);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("scenario: bad unsigned integer for '" + key + "': " + v);
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt_d(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

LinkScenario parse_scenario(const std::string& text) {
  LinkScenario sc;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("scenario: line " + std::to_string(lineno) +
                         " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));

    if (key == "schema_version") sc.schema_version = to_int(key, val);
    else if (key == "name") sc.name = val;
    else if (key == "format") sc.format = val;
    else if (key == "waveform") sc.waveform = val;
    else if (key == "baud_hz") sc.baud = to_double(key, val);
    else if (key == "rolloff") sc.rolloff = to_double(key, val);
    else if (key == "sps") sc.sps = to_int(key, val);
    else if (key == "span_symbols") sc.span_symbols = to_int(key, val);
    else if (key == "upconversion_hz") sc.upconversion = to_double(key, val);
    else if (key == "ptspr_db") sc.ptspr_db = to_double(key, val);
    else if (key == "bias_phase_rad") sc.bias_phase = to_double(key, val);
    else if (key == "payload_order") sc.payload_order = to_int(key, val);
    else if (key == "payload_periods") sc.payload_periods = to_int(key, val);
    else if (key == "linewidth_hz") sc.linewidth = to_double(key, val);
    else if (key == "freq_offset_hz") sc.freq_offset = to_double(key, val);
    else if (key == "impairments") sc.impairments = split_list(val);
    else if (key == "photocurrent_ma") sc.photocurrent = to_double(key, val) * 1e-3;
    else if (key == "ref_photocurrent_ma")
      sc.ref_photocurrent = to_double(key, val) * 1e-3;
    else if (key == "snr_at_ref_db") sc.snr_at_ref = to_double(key, val);
    else if (key == "saturation_ma")
      sc.saturation_current = to_double(key, val) * 1e-3;
    else if (key == "sat_knee") sc.sat_knee = to_double(key, val);
    else if (key == "if_low_cut_hz") sc.if_low_cut = to_double(key, val);
    else if (key == "if_high_cut_hz") sc.if_high_cut = to_double(key, val);
    else if (key == "if_center_hz") sc.if_center = to_double(key, val);
    else if (key == "lf_rel_db") sc.lf_rel_db = to_double(key, val);
    else if (key == "lf_corner_hz") sc.lf_corner = to_double(key, val);
    else if (key == "wdm_anchor_hz") sc.wdm_anchor = to_double(key, val);
    else if (key == "wdm_spacing_hz") sc.wdm_spacing = to_double(key, val);
    else if (key == "wdm_count") sc.wdm_count = to_int(key, val);
    else if (key == "wdm_anchor_index") sc.wdm_anchor_index = to_int(key, val);
    else if (key == "wdm_decorr_symbols")
      sc.wdm_decorr_symbols = to_int(key, val);
    else if (key == "channel_freq_hz") sc.channel_freq = to_double(key, val);
    else if (key == "recovery") sc.recovery = val;
    else if (key == "pilot_bw_hz") sc.pilot_bw = to_double(key, val);
    else if (key == "pilot_shape") sc.pilot_shape = val;
    else if (key == "bps_test_phases") sc.bps_test_phases = to_int(key, val);
    else if (key == "bps_block") sc.bps_block = to_int(key, val);
    else if (key == "eq_taps") sc.eq_taps = to_int(key, val);
    else if (key == "eq_step_rde") sc.eq_step_rde = to_double(key, val);
    else if (key == "eq_step_dd") sc.eq_step_dd = to_double(key, val);
    else if (key == "eq_max_epochs") sc.eq_max_epochs = to_int(key, val);
    else if (key == "seed") sc.seed = to_u64(key, val);
    else if (key == "sweep_axis") sc.sweep_axis = val;
    else if (key == "sweep_start") sc.sweep_start = to_double(key, val);
    else if (key == "sweep_stop") sc.sweep_stop = to_double(key, val);
    else if (key == "sweep_step") sc.sweep_step = to_double(key, val);
    else
      throw config_error("scenario: unknown key '" + key + "' (line " +
                         std::to_string(lineno) + ")");
  }
  return sc;
}

LinkScenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("scenario: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const LinkScenario& sc) {
  std::string out;
  const auto kv = [&out](const std::string& k, const std::string& v) {
    out += k;
    out += " = ";
    out += v;
    out += "\n";
  };
  kv("schema_version", std::to_string(sc.schema_version));
  kv("name", sc.name);
  kv("format", sc.format);
  kv("waveform", sc.waveform);
  kv("baud_hz", fmt_d(sc.baud));
  kv("rolloff", fmt_d(sc.rolloff));
  kv("sps", std::to_string(sc.sps));
  kv("span_symbols", std::to_string(sc.span_symbols));
  kv("upconversion_hz", fmt_d(sc.upconversion));
  kv("ptspr_db", fmt_d(sc.ptspr_db));
  kv("bias_phase_rad", fmt_d(sc.bias_phase));
  kv("payload_order", std::to_string(sc.payload_order));
  kv("payload_periods", std::to_string(sc.payload_periods));
  kv("linewidth_hz", fmt_d(sc.linewidth));
  kv("freq_offset_hz", fmt_d(sc.freq_offset));
  std::string imp;
  for (std::size_t i = 0; i < sc.impairments.size(); ++i) {
    if (i) imp += ",";
    imp += sc.impairments[i];
  }
  kv("impairments", imp);
  kv("photocurrent_ma", fmt_d(sc.photocurrent * 1e3));
  kv("ref_photocurrent_ma", fmt_d(sc.ref_photocurrent * 1e3));
  kv("snr_at_ref_db", fmt_d(sc.snr_at_ref));
  kv("saturation_ma", fmt_d(sc.saturation_current * 1e3));
  kv("sat_knee", fmt_d(sc.sat_knee));
  kv("if_low_cut_hz", fmt_d(sc.if_low_cut));
  kv("if_high_cut_hz", fmt_d(sc.if_high_cut));
  kv("if_center_hz", fmt_d(sc.if_center));
  kv("lf_rel_db", fmt_d(sc.lf_rel_db));
  kv("lf_corner_hz", fmt_d(sc.lf_corner));
  kv("wdm_anchor_hz", fmt_d(sc.wdm_anchor));
  kv("wdm_spacing_hz", fmt_d(sc.wdm_spacing));
  kv("wdm_count", std::to_string(sc.wdm_count));
  kv("wdm_anchor_index", std::to_string(sc.wdm_anchor_index));
  kv("wdm_decorr_symbols", std::to_string(sc.wdm_decorr_symbols));
  kv("channel_freq_hz", fmt_d(sc.channel_freq));
  kv("recovery", sc.recovery);
  kv("pilot_bw_hz", fmt_d(sc.pilot_bw));
  kv("pilot_shape", sc.pilot_shape);
  kv("bps_test_phases", std::to_string(sc.bps_test_phases));
  kv("bps_block", std::to_string(sc.bps_block));
  kv("eq_taps", std::to_string(sc.eq_taps));
  kv("eq_step_rde", fmt_d(sc.eq_step_rde));
  kv("eq_step_dd", fmt_d(sc.eq_step_dd));
  kv("eq_max_epochs", std::to_string(sc.eq_max_epochs));
  kv("seed", std::to_string(sc.seed));
  kv("sweep_axis", sc.sweep_axis);
  kv("sweep_start", fmt_d(sc.sweep_start));
  kv("sweep_stop", fmt_d(sc.sweep_stop));
  kv("sweep_step", fmt_d(sc.sweep_step));
  return out;
}

std::uint64_t config_hash(const LinkScenario& sc) {
  const std::string text = serialize_scenario(sc);
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void validate_scenario(const LinkScenario& sc) {
  const auto fail = [](const std::string& msg) { throw config_error("scenario: " + msg); };
  if (sc.schema_version != 1) fail("unsupported schema_version");
  if (sc.name.empty()) fail("name is required");
  if (sc.format != "qam16") fail("format must be qam16");
  if (sc.waveform != "ssb" && sc.waveform != "twin-ssb")
    fail("waveform must be ssb or twin-ssb");
  if (sc.baud <= 0.0) fail("baud_hz must be positive");
  if (!(sc.rolloff > 0.0 && sc.rolloff <= 1.0)) fail("rolloff must be in (0, 1]");
  if (sc.sps < 4 || sc.sps % 2 != 0) fail("sps must be even and >= 4");
  if (sc.span_symbols < 8 || sc.span_symbols % 2 != 0)
    fail("span_symbols must be even and >= 8");
  if (sc.payload_order < 4 || sc.payload_order > 20)
    fail("payload_order must be in [4, 20]");
  if (sc.payload_periods < 1) fail("payload_periods must be >= 1");
  if (sc.guard_band() <= 0.0)
    fail("upconversion_hz leaves no guard band between pilot and sideband");
  const double nyquist = sc.sps * sc.baud / 2.0;
  if (sc.upconversion + sc.signal_bandwidth() / 2.0 >= nyquist)
    fail("sideband exceeds the Nyquist band; raise sps");
  if (sc.ptspr_db < -40.0 || sc.ptspr_db > 10.0)
    fail("ptspr_db must be in [-40, 10]");
  if (!(std::abs(sc.bias_phase) < pi / 4.0))
    fail("bias_phase_rad must be inside (-pi/4, pi/4)");
  if (sc.linewidth < 0.0) fail("linewidth_hz must be >= 0");

  static const std::vector<std::string> known_imps = {
      "phase-noise", "offset", "saturation", "if-response", "awgn",
      "low-freq-noise"};
  for (const auto& imp : sc.impairments) {
    if (std::find(known_imps.begin(), known_imps.end(), imp) == known_imps.end())
      fail("unknown impairment '" + imp + "'");
    if (std::count(sc.impairments.begin(), sc.impairments.end(), imp) > 1)
      fail("impairment '" + imp + "' listed more than once");
  }

  if (sc.recovery != "pilot" && sc.recovery != "bps")
    fail("recovery must be pilot or bps");
  if (sc.waveform == "twin-ssb" && sc.recovery != "pilot")
    fail("twin-ssb runs use pilot recovery");
  if (sc.recovery == "pilot") {
    if (!(sc.pilot_bw > 0.0 && sc.pilot_bw < sc.guard_band()))
      fail("pilot_bw_hz must fit inside the guard band");
    if (!(std::abs(sc.freq_offset) < sc.guard_band() / 2.0))
      fail("freq_offset_hz must stay below half the guard band for pilot recovery");
  } else {
    if (!(std::abs(sc.freq_offset) < sc.baud / 8.0))
      fail("freq_offset_hz must stay below baud/8 for blind recovery");
  }
  if (sc.pilot_shape != "brickwall" && sc.pilot_shape != "gaussian")
    fail("pilot_shape must be brickwall or gaussian");
  if (sc.bps_test_phases < 4 || sc.bps_test_phases % 4 != 0)
    fail("bps_test_phases must be >= 4 and divisible by 4");
  if (sc.bps_block < 8) fail("bps_block must be >= 8");

  if (sc.photocurrent <= 0.0 || sc.ref_photocurrent <= 0.0 ||
      sc.saturation_current <= 0.0)
    fail("photocurrents must be positive");
  if (sc.sat_knee <= 0.0) fail("sat_knee must be positive");
  if (!(sc.if_low_cut >= 0.0 && sc.if_low_cut < sc.if_high_cut))
    fail("need 0 <= if_low_cut_hz < if_high_cut_hz");
  if (sc.if_center < 0.0) fail("if_center_hz must be >= 0");
  if (sc.lf_corner <= 0.0) fail("lf_corner_hz must be positive");

  if (sc.wdm_count < 1) fail("wdm_count must be >= 1");
  if (sc.wdm_spacing <= 0.0) fail("wdm_spacing_hz must be positive");
  if (sc.wdm_anchor_index < 0 || sc.wdm_anchor_index >= sc.wdm_count)
    fail("wdm_anchor_index must be inside the grid");
  if (sc.wdm_decorr_symbols < 0 ||
      static_cast<std::size_t>(sc.wdm_decorr_symbols) >= sc.period_symbols())
    fail("wdm_decorr_symbols must be in [0, period)");
  if (sc.channel_freq <= 0.0) fail("channel_freq_hz must be positive");

  if (sc.eq_taps < 3 || sc.eq_taps % 2 == 0) fail("eq_taps must be odd and >= 3");
  if (sc.eq_step_rde <= 0.0 || sc.eq_step_dd <= 0.0)
    fail("equalizer steps must be positive");
  if (sc.eq_max_epochs < 1) fail("eq_max_epochs must be >= 1");

  if (!sc.sweep_axis.empty()) {
    if (sc.sweep_axis != "photocurrent" && sc.sweep_axis != "ptspr_db" &&
        sc.sweep_axis != "channel_freq")
      fail("sweep_axis must be photocurrent, ptspr_db or channel_freq");
    if (sc.sweep_step <= 0.0) fail("sweep_step must be positive");
    if (sc.sweep_stop < sc.sweep_start) fail("sweep_stop must be >= sweep_start");
  }
}

namespace {

std::vector<double> expand_range(double start, double stop, double step) {
  check(step > 0.0, "sweep: step must be positive");
  check(stop >= start, "sweep: stop must be >= start");
  std::vector<double> values;
  for (double v = start; v <= stop + step / 2.0; v += step) values.push_back(v);
  return values;
}

}  // namespace

SweepSpec parse_sweep_arg(const std::string& arg) {
  const auto eq = arg.find('=');
  check(eq != std::string::npos, "sweep: expected axis=start:stop:step");
  SweepSpec spec;
  spec.axis = arg.substr(0, eq);
  check(spec.axis == "photocurrent" || spec.axis == "ptspr_db" ||
            spec.axis == "channel_freq",
        "sweep: axis must be photocurrent, ptspr_db or channel_freq");
  const std::string rest = arg.substr(eq + 1);
  const auto c1 = rest.find(':');
  const auto c2 = rest.find(':', c1 == std::string::npos ? 0 : c1 + 1);
  check(c1 != std::string::npos && c2 != std::string::npos,
        "sweep: expected axis=start:stop:step");
  try {
    const double a = std::stod(rest.substr(0, c1));
    const double b = std::stod(rest.substr(c1 + 1, c2 - c1 - 1));
    const double c = std::stod(rest.substr(c2 + 1));
    spec.values = expand_range(a, b, c);
  } catch (const config_error&) {
    throw;
  } catch (const std::exception&) {
    throw config_error("sweep: bad number in '" + rest + "'");
  }
  return spec;
}

SweepSpec default_sweep(const LinkScenario& sc) {
  SweepSpec spec;
  if (sc.sweep_axis.empty()) return spec;
  spec.axis = sc.sweep_axis;
  spec.values = expand_range(sc.sweep_start, sc.sweep_stop, sc.sweep_step);
  return spec;
}

}  // namespace bridgesim
