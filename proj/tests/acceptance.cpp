// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "schatten_qp/channels.hpp"
#include "schatten_qp/entropy.hpp"
#include "schatten_qp/qnorm.hpp"
#include "schatten_qp/random.hpp"
#include "schatten_qp/verify.hpp"

namespace {

using namespace sqp;
using Clock = std::chrono::steady_clock;
using Pairs = std::vector<std::pair<double, double>>;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

Matrix diag(const std::vector<double>& v) {
  Matrix m = Matrix::Zero(static_cast<int>(v.size()), static_cast<int>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = v[i];
  return m;
}

// 1. Commutative oracle, 30 diagonal operators per shape, under 2 minutes.
Outcome criterion_1() {
  Outcome o;
  const auto start = Clock::now();
  const Pairs pairs = {{0.5, 1}, {1, 0.5}, {2.0 / 3, 4.0 / 3}, {2, 1}, {1, 2}, {0.75, 0.75}};
  Rng rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  for (int d2 : {2, 3})
    for (int k = 0; k < 30; ++k) {
      Matrix v(2, d2);
      std::vector<double> flat;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < d2; ++j) {
          v(i, j) = u(rng);
          flat.push_back(v(i, j).real());
        }
      const BipartiteOperator x(diag(flat), {2, d2});
      for (const auto& [q, p] : pairs)
        worst = std::max(worst, rel(two_index_norm(x, {q, p}).value, lqlp_oracle(v, q, p)));
    }
  const double t = seconds_since(start);
  o.require(worst <= 5e-3, "relative gap <= 5e-3");
  o.require(t < 120.0, "runtime < 2 min");
  o.detail << " worst_rel=" << worst << " time=" << t << "s";
  return o;
}

// 2. Closed-form identities, 20 trials each.
Outcome criterion_2() {
  Outcome o;
  Rng rng(202);
  double exact = 0, ptrace = 0, tensor_gap = 0, block = 0;
  for (int t = 0; t < 20; ++t) {
    const int d2 = t % 2 ? 3 : 2;
    const Matrix x = gaussian_matrix(2 * d2, 2 * d2, rng);
    for (double q : {0.5, 1.0, 2.0, 3.0})
      exact = std::max(exact, rel(two_index_norm(BipartiteOperator(x, {2, d2}), {q, q}).value, oracle::schatten(x, q)));

    const BipartiteOperator psd = random_bipartite_psd(2, d2, 2 * d2, rng);
    const Matrix reduced = oracle::ptrace(psd.matrix, 2, d2, 1);
    for (double q : {0.5, 0.75, 2.0})
      ptrace = std::max(ptrace, rel(two_index_norm(psd, {q, 1}).value, oracle::schatten(reduced, q)));

    const Matrix a = gaussian_matrix(2, 2, rng), b = gaussian_matrix(d2, d2, rng);
    const BipartiteOperator ab(oracle::kron(a, b), {2, d2});
    for (const auto& [q, p] : Pairs{{0.5, 1}, {2, 1}, {1, 2}, {0.75, 1.5}})
      tensor_gap = std::max(tensor_gap, rel(two_index_norm(ab, {q, p}).value,
                                            oracle::schatten(a, q) * oracle::schatten(b, p)));

    const std::vector<Matrix> blocks = {gaussian_matrix(d2, d2, rng), gaussian_matrix(d2, d2, rng)};
    const BipartiteOperator bd(direct_sum(blocks), {2, d2});
    for (const auto& [q, p] : Pairs{{2, 1}, {1, 2}, {0.5, 1}, {1.5, 0.75}}) {
      const double formula =
          std::pow(std::pow(oracle::schatten(blocks[0], p), q) + std::pow(oracle::schatten(blocks[1], p), q), 1 / q);
      block = std::max(block, rel(two_index_norm(bd, {q, p}).value, formula));
    }
  }
  o.require(exact <= 1e-12, "(q,q) exact");
  o.require(ptrace <= 5e-3, "(q,1) partial trace");
  o.require(tensor_gap <= 5e-3, "tensor multiplicativity");
  o.require(block <= 5e-3, "block-diagonal formula");
  o.detail << " qq=" << exact << " ptrace=" << ptrace << " tensor=" << tensor_gap << " block=" << block;
  return o;
}

// 3. Counterexample regressions.
Outcome criterion_3() {
  Outcome o;
  CheckSpec s;
  s.check_id = "block_counterexample";
  s.trials = 1;
  s.indices = {2, 1.0 / 3};
  const CheckReport r = run_check(s);
  const auto& v = r.notes.at("values").at(0);
  const double computed = v.at("computed").get<double>(), formula = v.at("block_formula").get<double>();
  o.require(computed >= 4.0 - 1e-3, "sup-norm >= 4 - 1e-3");
  o.require(std::abs(formula - std::sqrt(2.0)) <= 1e-12, "block formula 2^(1/2)");
  o.require(computed - formula >= 4.0 - std::sqrt(2.0) - 2e-3, "gap >= 4 - sqrt2 - 2e-3");

  const CPMap replacer = replacer_channel(2);
  const double cb = cb_norm_estimate(replacer, 0.5, 0.5, 2).value;
  const double plain = mixed_norm_pos(replacer, 0.5, 0.5).value;
  o.require(cb >= 4.0 - 1e-3, "cb estimate >= 4 - 1e-3");
  o.require(std::abs(plain - 2.0) <= 1e-3, "mixed norm = 2 +- 1e-3");
  o.detail << " block: computed=" << computed << " formula=" << formula << "; replacer: cb=" << cb
           << " plain=" << plain;
  return o;
}

// 4. Relational consistency on 10 random PSD 2x2 operators.
Outcome criterion_4() {
  Outcome o;
  const std::vector<IndexTriple> triples = {{0.5, 1, 0.75}, {2, 1, 1.5}, {0.5, 0.75, 1}};
  Rng rng(404);
  double worst = 0;
  for (int t = 0; t < 10; ++t) {
    const BipartiteOperator x = random_bipartite_psd(2, 2, 4, rng);
    for (const IndexTriple& tr : triples)
      worst = std::max(worst, rel(relational_factor_value(x, tr).value, two_index_norm(x, {tr.q, tr.t}).value));
  }
  o.require(worst <= 5e-3, "relative gap <= 5e-3");
  o.detail << " worst_rel=" << worst;
  return o;
}

// 5. Entropy cross-validation.
Outcome criterion_5() {
  Outcome o;
  const double log2 = std::log(2.0);
  double cond = 0;
  for (double alpha : {0.5, 0.75, 2.0, 3.0})
    for (int t = 0; t < 50; ++t) {
      const int db = t % 2 ? 3 : 2;
      const State rho(random_density(2 * db, derive_seed(505, "state", static_cast<std::uint64_t>(t))), {2, db});
      cond = std::max(cond, std::abs(conditional_entropy_norm(rho, alpha).value -
                                     conditional_entropy_direct(rho, alpha).value));
    }
  const double ent = conditional_entropy_norm(State(max_entangled(2), {2, 2}), 0.5).value;
  const double mixed = conditional_entropy_norm(State(identity(4) / 4.0, {2, 2}), 0.5).value;
  double uml = 0, prod = 0;
  for (int t = 0; t < 10; ++t) {
    const State rho(random_density(4, derive_seed(505, "umlaut", static_cast<std::uint64_t>(t))), {2, 2});
    uml = std::max(uml, std::abs(umlaut(rho, 0.5, Method::NormBased).value - umlaut(rho, 0.5, Method::Direct).value));
    const State p(tensor(random_density(2, 600 + t), random_density(2, 700 + t)), {2, 2});
    prod = std::max(prod, std::abs(umlaut(p, 0.5, Method::NormBased).value));
  }
  o.require(cond <= 5e-3, "norm vs direct conditional entropy");
  o.require(std::abs(ent + log2) <= 5e-3, "maximally entangled -log 2");
  o.require(std::abs(mixed - log2) <= 5e-3, "maximally mixed log 2");
  o.require(uml <= 5e-3, "umlaut norm vs direct");
  o.require(prod <= 5e-3, "umlaut of product states");
  o.detail << " cond_gap=" << cond << " entangled=" << ent << " mixed=" << mixed << " umlaut_gap=" << uml
           << " product=" << prod;
  return o;
}

// 6. One-sided inequality suites at 10 trials on qubit factors.
Outcome criterion_6() {
  Outcome o;
  const std::vector<std::string> ids = {"kappa_triangle",      "minkowski",          "hoelder_equality",
                                        "entropy_bounds",      "continuity_bound",   "cb_supermult_conorm",
                                        "cb_submult_norm",     "max_output_additivity", "min_output_additivity"};
  std::vector<CheckSpec> specs;
  for (const std::string& id : ids) {
    CheckSpec s;
    s.check_id = id;
    s.trials = 10;
    s.dims = {2, 2};
    s.seed = 606;
    specs.push_back(s);
  }
  const auto start = Clock::now();
  const SuiteResult r = run_suite(specs);
  for (const CheckReport& c : r.reports) {
    o.require(c.passed(), c.check_id + " failures=" + std::to_string(c.failures));
    o.detail << " " << c.check_id << "=" << c.worst_margin << "/" << c.tolerance;
  }
  o.detail << " time=" << seconds_since(start) << "s";
  return o;
}

// 7. Two `verify --all --seed 7` runs of the tool give byte-identical reports; the first run also
// times the full default suite against the 30 minute budget of criterion 6.
Outcome criterion_7(double* suite_seconds) {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / ("sqp_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  std::string reports[2];
  for (int i = 0; i < 2; ++i) {
    const auto file = dir / ("report" + std::to_string(i) + ".json");
    const std::string cmd = std::string("\"") + SQP_CLI_PATH + "\" verify --all --seed 7 --out \"" + file.string() +
                            "\" > /dev/null";
    const auto start = Clock::now();
    const int status = std::system(cmd.c_str());
    if (i == 0) *suite_seconds = seconds_since(start);
    o.require(status == 0, "run " + std::to_string(i) + " exit status 0");
    std::ifstream in(file, std::ios::binary);
    reports[i].assign(std::istreambuf_iterator<char>(in), {});
  }
  std::filesystem::remove_all(dir);
  o.require(!reports[0].empty(), "report written");
  o.require(reports[0] == reports[1], "byte-identical reports");
  o.detail << " bytes=" << reports[0].size() << " suite_time=" << *suite_seconds << "s";
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const std::function<Outcome()>& run) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ":" << o.detail.str() << " ("
              << seconds_since(start) << "s)" << std::endl;
  };
  double suite_seconds = 0;
  report(1, criterion_1);
  report(2, criterion_2);
  report(3, criterion_3);
  report(4, criterion_4);
  report(5, criterion_5);
  report(6, criterion_6);
  report(7, [&] { return criterion_7(&suite_seconds); });
  const bool budget = suite_seconds > 0 && suite_seconds < 1800;
  if (!budget) ++failed;
  std::cout << (budget ? "PASS" : "FAIL") << " criterion 6 (suite budget): default suite " << suite_seconds
            << "s < 1800s" << std::endl;
  return failed == 0 ? 0 : 1;
}
