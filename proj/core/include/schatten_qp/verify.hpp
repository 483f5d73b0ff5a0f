#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "schatten_qp/linalg.hpp"

namespace sqp {

struct CheckSpec {
  std::string check_id;
  int trials = 10;
  Dims dims;                    // empty: alternate 2x2 and 2x3 where the check allows
  std::vector<double> indices;  // flat list, grouped by the check's arity; empty: defaults
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;  // "tol" overrides the check tolerance
  std::map<std::string, double> options;     // check-specific knobs, e.g. "product_env"

  void validate() const;  // UnknownCheck, BadIndex, ShapeMismatch
};

struct CheckReport {
  std::string check_id;
  std::string claim;
  int trials_run = 0;
  int failures = 0;
  double worst_margin = 0.0;  // largest violation; the check fails when it exceeds tolerance
  double tolerance = 0.0;
  nlohmann::json witnesses = nlohmann::json::array();  // failing probes
  nlohmann::json notes = nlohmann::json::object();     // values from the first trial
  double wall_time = 0.0;                              // seconds

  bool passed() const { return failures == 0; }
};

struct SuiteResult {
  std::vector<CheckReport> reports;
  int failed_checks = 0;
  bool passed() const { return failed_checks == 0; }
};

// Registered check ids in suite order.
const std::vector<std::string>& check_ids();
bool is_check(const std::string& id);
// Default trial count used by the full suite for this check.
int default_trials(const std::string& id);

CheckReport run_check(const CheckSpec& spec);
SuiteResult run_suite(const std::vector<CheckSpec>& specs);
// Every registered check with its default trial count (or `trials` when positive).
std::vector<CheckSpec> default_suite(std::uint64_t seed, int trials = 0);

// Re-runs the trial recorded in a witness and returns its worst margin.
double replay_witness(const CheckSpec& spec, const nlohmann::json& witness);

nlohmann::json report_to_json(const CheckReport& r, bool timings = false);
nlohmann::json suite_to_json(const SuiteResult& s, bool timings = false);
std::string summary_line(const SuiteResult& s);

}  // namespace sqp
