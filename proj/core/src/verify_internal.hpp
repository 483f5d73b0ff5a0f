#pragma once

// Check registry shared by the verify harness and the check implementations.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "schatten_qp/optimizer.hpp"
#include "schatten_qp/random.hpp"
#include "schatten_qp/verify.hpp"

namespace sqp::verify_detail {

// margin > tolerance marks a violation. Margins are oriented so that slack in the computed
// quantities moves them towards passing wherever the bound directions allow.
struct Probe {
  double margin = 0.0;
  nlohmann::json data;
};

struct Trial {
  std::vector<Probe> probes;
  nlohmann::json notes = nlohmann::json::object();
};

struct Context {
  const CheckSpec& spec;
  int trial = 0;
  std::uint64_t seed = 0;  // per-trial seed
  std::vector<std::vector<double>> groups;  // index groups for this check

  Rng rng(std::string_view tag) const { return Rng(derive_seed(seed, tag)); }
  std::uint64_t sub_seed(std::string_view tag, std::uint64_t k = 0) const {
    return derive_seed(seed, tag, k);
  }
  // spec.dims if it has `n` entries, else 2x2 on even trials and 2x3 on odd ones.
  Dims dims(size_t n = 2) const;
  double option(const std::string& key, double fallback) const;
  OptimizerConfig config(int restarts) const;
  // Full rank on two of every three trials, deficient otherwise.
  int rank(int full) const;
};

using TrialFn = Trial (*)(const Context&);

struct CheckInfo {
  const char* id;
  const char* claim;
  double tolerance;
  int default_trials;
  int arity;  // indices per group
  std::vector<double> default_indices;
  TrialFn run;
  void (*validate_group)(const std::vector<double>&) = nullptr;
};

const std::vector<CheckInfo>& registry();

}  // namespace sqp::verify_detail
