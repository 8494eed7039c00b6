#include "oseenlab/reports.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "oseenlab/version.hpp"

namespace oseenlab {

bool ScenarioReport::pass() const {
  if (checks.empty()) return false;
  for (const CheckResult& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

void ScenarioReport::add(const std::string& name, bool ok, double observed,
                         double threshold, const std::string& note) {
  checks.push_back({name, ok, observed, threshold, note});
}

nlohmann::json to_json(const CheckResult& c) {
  return {{"name", c.name},
          {"pass", c.pass},
          {"observed", c.observed},
          {"threshold", c.threshold},
          {"note", c.note}};
}

nlohmann::json to_json(const ScenarioReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckResult& c : r.checks) checks.push_back(to_json(c));
  return {{"scenario", r.scenario},
          {"version", kVersion},
          {"format_version", kReportFormatVersion},
          {"config_hash", r.config_hash},
          {"seed", r.seed},
          {"elapsed_seconds", r.elapsed_seconds},
          {"pass", r.pass()},
          {"checks", checks},
          {"extra", r.extra}};
}

void write_report_json(const std::filesystem::path& file,
                       const ScenarioReport& r) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open report file " + file.string());
  }
  out << to_json(r).dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing report " + file.string());
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf, 16);
}

}  // namespace oseenlab
