#pragma once

// Verification report plumbing: named pass/fail checks with the observed
// value and its threshold, serialized to report.json.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace oseenlab {

struct CheckResult {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double threshold = 0.0;
  std::string note;  // free-form context (fit constants, rates, ...)
};

struct ScenarioReport {
  std::string scenario;
  std::string config_hash;  // fnv1a-64 of the canonical config dump
  unsigned seed = 0;
  double elapsed_seconds = 0.0;
  std::vector<CheckResult> checks;
  nlohmann::json extra;  // scenario-specific payload (fits, sweeps, ...)

  bool pass() const;
  void add(const std::string& name, bool ok, double observed,
           double threshold, const std::string& note = "");
};

nlohmann::json to_json(const CheckResult& c);
nlohmann::json to_json(const ScenarioReport& r);
void write_report_json(const std::filesystem::path& file,
                       const ScenarioReport& r);

// fnv1a-64 hash of a byte string, rendered as 16 hex digits.
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace oseenlab
