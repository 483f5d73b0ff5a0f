#include "schatten_qp/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "schatten_qp/io.hpp"
#include "schatten_qp/parallel.hpp"
#include "verify_internal.hpp"

namespace sqp {

namespace vd = verify_detail;

namespace verify_detail {

Dims Context::dims(size_t n) const {
  if (spec.dims.size() == n) return spec.dims;
  Dims d(n, 2);
  if (trial % 2 == 1) d.back() = 3;
  return d;
}

double Context::option(const std::string& key, double fallback) const {
  const auto it = spec.options.find(key);
  return it == spec.options.end() ? fallback : it->second;
}

OptimizerConfig Context::config(int restarts) const {
  OptimizerConfig c;
  c.restarts = restarts;
  c.seed = sub_seed("optimizer");
  return c;
}

int Context::rank(int full) const {
  if (trial % 3 != 2 || full < 2) return full;
  return 1 + static_cast<int>(sub_seed("rank") % static_cast<std::uint64_t>(full - 1));
}

}  // namespace verify_detail

namespace {

const vd::CheckInfo& lookup(const std::string& id) {
  for (const vd::CheckInfo& c : vd::registry())
    if (id == c.id) return c;
  throw UnknownCheck("unknown check id '" + id + "'");
}

std::vector<std::vector<double>> index_groups(const vd::CheckInfo& info, const CheckSpec& spec) {
  const std::vector<double>& flat = spec.indices.empty() ? info.default_indices : spec.indices;
  std::vector<std::vector<double>> groups;
  if (info.arity == 0) return groups;
  if (flat.size() % static_cast<size_t>(info.arity) != 0) {
    std::ostringstream msg;
    msg << spec.check_id << " takes indices in groups of " << info.arity;
    throw BadIndex(msg.str());
  }
  for (size_t i = 0; i < flat.size(); i += static_cast<size_t>(info.arity))
    groups.emplace_back(flat.begin() + static_cast<long>(i),
                        flat.begin() + static_cast<long>(i) + info.arity);
  return groups;
}

double tolerance_for(const vd::CheckInfo& info, const CheckSpec& spec) {
  const auto it = spec.tolerances.find("tol");
  return it == spec.tolerances.end() ? info.tolerance : it->second;
}

vd::Trial run_trial(const vd::CheckInfo& info, const CheckSpec& spec,
                    const std::vector<std::vector<double>>& groups, int t) {
  vd::Context ctx{spec, t, derive_seed(spec.seed, info.id, static_cast<std::uint64_t>(t)), groups};
  return info.run(ctx);
}

bool violates(double margin, double tol) { return std::isnan(margin) || margin > tol; }

}  // namespace

void CheckSpec::validate() const {
  const vd::CheckInfo& info = lookup(check_id);
  if (trials < 1) throw BadIndex("trials must be at least 1");
  for (int d : dims)
    if (d < 2) throw ShapeMismatch("check dimensions must be at least 2");
  if (!dims.empty() && dims_product(dims) > 64)
    throw ShapeMismatch("check dimensions must multiply to at most 64");
  for (double e : indices)
    if (std::isnan(e)) throw BadIndex("index is NaN");
  for (const auto& [key, tol] : tolerances)
    if (!(tol >= 0.0)) throw BadIndex("tolerance '" + key + "' must be non-negative");
  const auto groups = index_groups(info, *this);
  if (info.validate_group)
    for (const auto& g : groups) info.validate_group(g);
}

const std::vector<std::string>& check_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const vd::CheckInfo& c : vd::registry()) out.emplace_back(c.id);
    return out;
  }();
  return ids;
}

bool is_check(const std::string& id) {
  const auto& ids = check_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

int default_trials(const std::string& id) { return lookup(id).default_trials; }

CheckReport run_check(const CheckSpec& spec) {
  spec.validate();
  const vd::CheckInfo& info = lookup(spec.check_id);
  const auto groups = index_groups(info, spec);
  const auto start = std::chrono::steady_clock::now();

  std::vector<vd::Trial> trials(static_cast<size_t>(spec.trials));
  parallel_for(spec.trials, [&](int t) { trials[t] = run_trial(info, spec, groups, t); });

  CheckReport r;
  r.check_id = spec.check_id;
  r.claim = info.claim;
  r.tolerance = tolerance_for(info, spec);
  r.trials_run = spec.trials;
  r.worst_margin = -kInf;
  constexpr size_t kMaxWitnesses = 10;
  for (int t = 0; t < spec.trials; ++t) {
    const vd::Trial& tr = trials[t];
    for (size_t i = 0; i < tr.probes.size(); ++i) {
      const double m = tr.probes[i].margin;
      r.worst_margin = std::isnan(m) ? kInf : std::max(r.worst_margin, m);
      if (!violates(m, r.tolerance)) continue;
      ++r.failures;
      if (r.witnesses.size() < kMaxWitnesses)
        r.witnesses.push_back({{"trial", t},
                               {"probe", i},
                               {"seed", derive_seed(spec.seed, info.id, static_cast<std::uint64_t>(t))},
                               {"margin", m},
                               {"data", tr.probes[i].data}});
    }
  }
  if (!trials.empty()) r.notes = trials.front().notes;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

double replay_witness(const CheckSpec& spec, const nlohmann::json& witness) {
  spec.validate();
  const vd::CheckInfo& info = lookup(spec.check_id);
  if (!witness.contains("trial") || !witness.contains("probe"))
    throw ParseError("witness needs 'trial' and 'probe' fields");
  const int t = witness.at("trial").get<int>();
  const auto i = witness.at("probe").get<size_t>();
  const vd::Trial tr = run_trial(info, spec, index_groups(info, spec), t);
  if (i >= tr.probes.size()) throw ParseError("witness probe index out of range");
  return tr.probes[i].margin;
}

SuiteResult run_suite(const std::vector<CheckSpec>& specs) {
  for (const CheckSpec& s : specs) s.validate();
  SuiteResult out;
  out.reports.resize(specs.size());
  // Trials inside each check run in parallel; checks run one after another.
  for (size_t i = 0; i < specs.size(); ++i) out.reports[i] = run_check(specs[i]);
  std::vector<size_t> order(specs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (specs[a].check_id != specs[b].check_id) return specs[a].check_id < specs[b].check_id;
    return specs[a].seed < specs[b].seed;
  });
  std::vector<CheckReport> sorted;
  for (size_t i : order) sorted.push_back(std::move(out.reports[i]));
  out.reports = std::move(sorted);
  for (const CheckReport& r : out.reports)
    if (!r.passed()) ++out.failed_checks;
  return out;
}

std::vector<CheckSpec> default_suite(std::uint64_t seed, int trials) {
  std::vector<CheckSpec> out;
  for (const vd::CheckInfo& c : vd::registry()) {
    CheckSpec s;
    s.check_id = c.id;
    s.trials = trials > 0 ? trials : c.default_trials;
    s.seed = seed;
    out.push_back(std::move(s));
  }
  return out;
}

nlohmann::json report_to_json(const CheckReport& r, bool timings) {
  nlohmann::json j = {{"check_id", r.check_id},
                      {"claim", r.claim},
                      {"trials_run", r.trials_run},
                      {"failures", r.failures},
                      {"passed", r.passed()},
                      {"worst_margin", r.worst_margin},
                      {"tolerance", r.tolerance},
                      {"witnesses", r.witnesses},
                      {"notes", r.notes}};
  if (timings) j["wall_time"] = r.wall_time;
  return j;
}

nlohmann::json suite_to_json(const SuiteResult& s, bool timings) {
  nlohmann::json out = nlohmann::json::array();
  for (const CheckReport& r : s.reports) out.push_back(report_to_json(r, timings));
  return out;
}

std::string summary_line(const SuiteResult& s) {
  int trials = 0, failures = 0;
  for (const CheckReport& r : s.reports) {
    trials += r.trials_run;
    failures += r.failures;
  }
  std::ostringstream msg;
  msg << "verify: " << s.reports.size() << " checks, " << trials << " trials, "
      << s.failed_checks << " failed checks, " << failures << " failing probes";
  if (s.failed_checks > 0) {
    msg << " [";
    bool first = true;
    for (const CheckReport& r : s.reports) {
      if (r.passed()) continue;
      msg << (first ? "" : ", ") << r.check_id;
      first = false;
    }
    msg << "]";
  }
  return msg.str();
}

}  // namespace sqp
