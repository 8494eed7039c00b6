#pragma once

// Named simulation/verification scenarios behind the CLI.  Each scenario
// resolves a config (defaults overlaid with a JSON file), runs, writes
// manifest.json / report.json / norms.csv / snapshots under its output
// directory, and returns the report.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "oseenlab/grid.hpp"
#include "oseenlab/reports.hpp"

namespace oseenlab {

struct ScenarioConfig {
  std::string scenario;
  Grid grid;
  double alpha = 0.5;
  double tau_begin = 0.0;
  double tau_end = 1.0;
  double dt = 0.01;
  unsigned seed = 1;
  int jobs = 1;
  std::filesystem::path output_dir;
  nlohmann::json extra;  // scenario-specific knobs

  nlohmann::json to_json() const;  // canonical dump (hash input)
};

struct ScenarioInfo {
  std::string name;
  std::string summary;   // one line, for `list`
  bool is_simulation = false;  // usable via `simulate` (vs verify-only)
};

const std::vector<ScenarioInfo>& scenario_catalog();
bool scenario_exists(const std::string& name);

// Machine-readable description of the config document: field names, types,
// defaults, and per-scenario extra knobs.
nlohmann::json config_schema_json();

// Defaults for one scenario (grid sizes, time window, knobs).
ScenarioConfig default_config(const std::string& scenario);

// Defaults overlaid with the JSON file's fields (unknown keys rejected).
ScenarioConfig load_config(const std::string& scenario,
                           const std::filesystem::path& file);

// Runs the scenario and writes its artifacts.  Throws on setup/IO errors;
// check failures are reported, not thrown.
ScenarioReport run_scenario(const ScenarioConfig& cfg);

}  // namespace oseenlab
