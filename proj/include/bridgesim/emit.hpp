#pragma once

#include <string>

#include "bridgesim/engine.hpp"

namespace bridgesim {

inline constexpr const char* tool_name = "bridgesim";
inline constexpr const char* tool_version = "1.0.0";
inline constexpr int result_schema_version = 1;

// Writes <out_dir>/<name>.json, <name>.csv and <name>.manifest.json, creating
// out_dir if needed. Output carries no timestamps or host state, so re-running
// the same configuration reproduces the files byte for byte. Returns the path
// of the JSON file.
std::string emit_results(const SweepResult& result, const std::string& out_dir);

// Inverse of the JSON side of emit_results.
SweepResult load_sweep_result(const std::string& json_path);

}  // namespace bridgesim
