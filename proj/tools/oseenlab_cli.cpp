// oseenlab: run and check the self-similar vortex-column laboratory.
//
//   oseenlab simulate --config run.json [--output-dir DIR] [--jobs N] [--seed S]
//   oseenlab verify --suite NAME [--config overlay.json] [...]
//   oseenlab list [--json]
//
// Exit codes: 0 all checks passed, 1 a check failed or the run aborted,
// 2 the config or command line was invalid.  The default artifact root is
// $OSEENLAB_OUTPUT_ROOT (falling back to ./runs).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "oseenlab/reports.hpp"
#include "oseenlab/scenarios.hpp"
#include "oseenlab/version.hpp"

namespace {

struct Overrides {
  std::string output_dir;
  unsigned seed = 0;
  int jobs = 0;
  bool has_output_dir = false;
  bool has_seed = false;
  bool has_jobs = false;

  void apply(oseenlab::ScenarioConfig& cfg) const {
    if (has_output_dir) cfg.output_dir = output_dir;
    if (has_seed) cfg.seed = seed;
    if (has_jobs) cfg.jobs = jobs;
  }
};

void add_override_flags(CLI::App* sub, Overrides& ov) {
  sub->add_option("--output-dir", ov.output_dir,
                  "artifact directory (default: $OSEENLAB_OUTPUT_ROOT/<scenario>-<hash8>)")
      ->each([&ov](const std::string&) { ov.has_output_dir = true; });
  sub->add_option("--seed", ov.seed, "master RNG seed override")
      ->each([&ov](const std::string&) { ov.has_seed = true; });
  sub->add_option("--jobs", ov.jobs, "worker cap override (advisory)")
      ->each([&ov](const std::string&) { ov.has_jobs = true; });
}

int report_and_exit_code(const oseenlab::ScenarioReport& rep) {
  int failed = 0;
  for (const auto& c : rep.checks) {
    if (!c.pass) ++failed;
    std::printf("%s  %-38s observed=%-13.6g threshold=%-10.6g%s%s\n",
                c.pass ? "PASS" : "FAIL", c.name.c_str(), c.observed,
                c.threshold, c.note.empty() ? "" : "  ", c.note.c_str());
  }
  if (rep.extra.is_object() && rep.extra.contains("output_dir")) {
    std::printf("artifacts: %s\n",
                rep.extra["output_dir"].get<std::string>().c_str());
  }
  std::printf("%s: %s, %zu checks, %d failed, %.1f s\n",
              rep.pass() ? "OK" : "FAILED", rep.scenario.c_str(),
              rep.checks.size(), failed, rep.elapsed_seconds);
  return rep.pass() ? 0 : 1;
}

bool scenario_is_simulation(const std::string& name) {
  for (const auto& s : oseenlab::scenario_catalog()) {
    if (s.name == name) return s.is_simulation;
  }
  return false;
}

int run_simulate(const std::string& config_path, const Overrides& ov) {
  std::ifstream in(config_path);
  if (!in) {
    throw std::invalid_argument("config: cannot open " + config_path);
  }
  const nlohmann::json j = nlohmann::json::parse(in);
  if (!j.is_object() || !j.contains("scenario")) {
    throw std::invalid_argument(
        "config: simulate needs a 'scenario' key in the config file");
  }
  const std::string name = j.at("scenario").get<std::string>();
  if (!oseenlab::scenario_exists(name)) {
    throw std::invalid_argument("config: unknown scenario '" + name + "'");
  }
  if (!scenario_is_simulation(name)) {
    throw std::invalid_argument("config: scenario '" + name +
                                "' is verification-only; use the verify command");
  }
  oseenlab::ScenarioConfig cfg = oseenlab::load_config(name, config_path);
  ov.apply(cfg);
  return report_and_exit_code(oseenlab::run_scenario(cfg));
}

int run_verify(const std::string& suite, const std::string& config_path,
               const Overrides& ov) {
  oseenlab::ScenarioConfig cfg =
      config_path.empty() ? oseenlab::default_config(suite)
                          : oseenlab::load_config(suite, config_path);
  ov.apply(cfg);
  return report_and_exit_code(oseenlab::run_scenario(cfg));
}

int run_list(bool as_json) {
  if (as_json) {
    std::cout << oseenlab::config_schema_json().dump(2) << "\n";
    return 0;
  }
  std::printf("%-24s %-10s %s\n", "scenario", "kind", "summary");
  for (const auto& s : oseenlab::scenario_catalog()) {
    std::printf("%-24s %-10s %s\n", s.name.c_str(),
                s.is_simulation ? "simulate" : "verify", s.summary.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "oseenlab - pseudo-spectral laboratory for the self-similar vortex "
      "column"};
  app.set_version_flag("--version", oseenlab::kVersion);
  app.require_subcommand(1);

  std::string sim_config;
  Overrides sim_ov;
  CLI::App* simulate =
      app.add_subcommand("simulate", "run a simulation scenario from a config file");
  simulate->add_option("--config", sim_config, "JSON config with a 'scenario' key")
      ->required();
  add_override_flags(simulate, sim_ov);

  std::string suite;
  std::string verify_config;
  Overrides verify_ov;
  CLI::App* verify =
      app.add_subcommand("verify", "run a verification suite by name");
  verify->add_option("--suite", suite, "scenario name (see the list command)")
      ->required();
  verify->add_option("--config", verify_config, "optional JSON overlay");
  add_override_flags(verify, verify_ov);

  bool as_json = false;
  CLI::App* list = app.add_subcommand("list", "show the scenario catalog");
  list->add_flag("--json", as_json,
                 "emit the catalog and the config schema as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad usage counts as invalid config
  }

  try {
    if (simulate->parsed()) return run_simulate(sim_config, sim_ov);
    if (verify->parsed()) return run_verify(suite, verify_config, verify_ov);
    if (list->parsed()) return run_list(as_json);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
