#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "schatten_qp/channels.hpp"
#include "schatten_qp/entropy.hpp"
#include "schatten_qp/io.hpp"
#include "schatten_qp/qnorm.hpp"
#include "verify_internal.hpp"

namespace sqp::verify_detail {

namespace {

using json = nlohmann::json;

json mat(const Matrix& m) { return io::matrix_to_json(m); }

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
// Relative amount by which lhs exceeds rhs (lhs <= rhs expected).
double excess(double lhs, double rhs) { return (lhs - rhs) / std::max(std::abs(rhs), 1e-300); }

// (sum_i v_i^q)^(1/q), the max for q = inf.
double lq(const std::vector<double>& v, double q) {
  if (q == kInf) return *std::max_element(v.begin(), v.end());
  double acc = 0.0;
  for (double x : v) acc += std::pow(x, q);
  return std::pow(acc, 1.0 / q);
}

// Operator of the requested rank, unit Frobenius norm.
Matrix random_operator(int n, int rank, Rng& rng) {
  Matrix m = gaussian_matrix(n, rank, rng) * gaussian_matrix(rank, n, rng);
  return m / m.norm();
}

Matrix isometry(int rows, int cols, Rng& rng) { return random_unitary(rows, rng).leftCols(cols); }

// Restarts by side: the side whose optimizer slack could fake a violation gets more effort.
int effort(bool unsafe) { return unsafe ? 8 : 2; }

BipartiteOperator swapped(const Matrix& rho_ab, const Dims& d) {
  return BipartiteOperator(permute_systems(rho_ab, d, {1, 0}), {d[1], d[0]});
}

// alpha/(1-alpha) log ||rho_BA||_(1,alpha) for alpha < 1, plus the norm itself.
std::pair<double, double> cond_entropy_below_one(const Matrix& rho_ab, const Dims& d, double alpha,
                                                 const OptimizerConfig& cfg) {
  const double n = two_index_norm(swapped(rho_ab, d), {1.0, alpha}, cfg).value;
  return {alpha / (1.0 - alpha) * std::log(n), n};
}

// sum_i |ii>/sqrt(dA), with the second index embedded into the first dA levels of B.
Matrix entangled_state(int da, int db) {
  Matrix v = Matrix::Zero(da * db, 1);
  for (int i = 0; i < da; ++i) v(i * db + i, 0) = 1.0 / std::sqrt(static_cast<double>(da));
  return v * v.adjoint();
}

OptimizerConfig chan_config(const Context& c, int restarts) {
  OptimizerConfig cfg = channel_config(c.sub_seed("optimizer"));
  cfg.restarts = restarts;
  return cfg;
}

CPMap trial_channel(const Context& c, const char* tag, int d_out = 2) {
  const int n_kraus = 2 + static_cast<int>(c.sub_seed(tag, 1) % 2);
  return random_channel(2, d_out, n_kraus, c.sub_seed(tag));
}

void add_note(Trial& tr, json entry) { tr.notes["values"].push_back(std::move(entry)); }

// ---- group validators ----

void compatible_pair(const std::vector<double>& g) {
  const IndexPair idx{g[0], g[1]};
  idx.require_positive();
  idx.require_compatible();
}

void positive_single(const std::vector<double>& g) { IndexPair{g[0], 1.0}.require_positive(); }

void incompatible_sup_pair(const std::vector<double>& g) {
  const IndexPair idx{g[0], g[1]};
  idx.require_positive();
  if (!(idx.q > idx.p) || idx.compatible())
    throw BadIndex("the block counterexample needs q > p with 1/p - 1/q > 1");
}

void compatible_triple(const std::vector<double>& g) {
  for (double v : g) IndexPair{v, 1.0}.require_positive();
  if (!IndexTriple{g[0], g[1], g[2]}.compatible())
    throw IncompatibleIndices("index triple is not pairwise compatible");
}

void sub_unit_pair(const std::vector<double>& g) {
  compatible_pair(g);
  if (g[0] > 1.0 || g[1] > 1.0) throw BadIndex("reverse Hoelder needs 0 < q, p <= 1");
}

void ordered_pair(const std::vector<double>& g) {
  compatible_pair(g);
  if (g[0] > g[1]) throw BadIndex("this check needs q <= p");
}

void entropy_alpha(const std::vector<double>& g) { require_alpha(g[0], 0.5, kInf, true); }

void entropy_alpha_below_one(const std::vector<double>& g) {
  require_alpha(g[0], 0.5, 1.0, true);
}

void cb_pair(const std::vector<double>& g) {
  compatible_pair(g);
  for (double e : g) {
    if (e < 0.5) throw BadIndex("cb estimates need indices >= 1/2");
    IndexPair{1.0, e}.require_compatible();
  }
}

void cb_descending_pair(const std::vector<double>& g) {
  cb_pair(g);
  if (g[0] < g[1]) throw BadIndex("this check needs q >= p");
}

void cb_ascending_pair(const std::vector<double>& g) {
  cb_pair(g);
  if (g[0] > g[1]) throw BadIndex("this check needs q <= p");
}

void flat_pair(const std::vector<double>& g) {
  cb_pair(g);
  const bool norm = g[0] >= 1.0 && g[1] <= 1.0;
  const bool conorm = g[0] <= 1.0 && g[1] >= 1.0;
  if (!norm && !conorm) throw BadIndex("flatness holds for q >= 1 >= p or q <= 1 <= p");
}

void output_entropy_p(const std::vector<double>& g) { require_alpha(g[0], 0.5, kInf, true); }

void min_entropy_p(const std::vector<double>& g) { require_alpha(g[0], 0.5, 1.0, true); }

void support_pair(const std::vector<double>& g) {
  compatible_pair(g);
  const IndexPair idx{g[0], g[1]};
  if (!idx.sup_type() || idx.r_inv() >= 1.0)
    throw BadIndex("optimizer_support needs q > p with 1/p - 1/q < 1");
}

void amgm_pair(const std::vector<double>& g) {
  const double r1 = g[0], r2 = g[1];
  if (!(r1 > 0.0) || r2 == 0.0 || std::isnan(r2) || std::isinf(r1) || std::isinf(r2))
    throw BadIndex("amgm_rewrite needs finite r1 > 0 and r2 != 0");
  if (r2 < 0.0 && !(2.0 / r1 + 1.0 / r2 < 0.0))
    throw BadIndex("with r2 < 0 the rewrite needs 2/r1 + 1/r2 < 0");
}

void holder_pair(const std::vector<double>& g) {
  const IndexPair idx{g[0], g[1]};
  idx.require_positive();
  if (g[0] == kInf && g[1] == kInf) throw BadIndex("q and p cannot both be infinite");
}

// ---- checks ----

Trial block_diagonal(const Context& c) {
  const Dims d = c.dims();
  Rng rng = c.rng("instance");
  std::vector<Matrix> blocks;
  for (int i = 0; i < d[0]; ++i) blocks.push_back(random_operator(d[1], c.rank(d[1]), rng));
  const BipartiteOperator x(direct_sum(blocks), d);
  Trial tr;
  for (const auto& g : c.groups) {
    const IndexPair idx{g[0], g[1]};
    std::vector<double> norms;
    for (const Matrix& b : blocks) norms.push_back(schatten_norm(b, idx.p));
    const double formula = lq(norms, idx.q);
    const double value = two_index_norm(x, idx, c.config(4)).value;
    tr.probes.push_back({rel_gap(value, formula),
                         {{"q", idx.q}, {"p", idx.p}, {"value", value}, {"formula", formula},
                          {"x", mat(x.matrix)}}});
    add_note(tr, {{"q", idx.q}, {"p", idx.p}, {"value", value}, {"formula", formula}});
  }
  return tr;
}

Trial block_counterexample(const Context& c) {
  const BipartiteOperator x(direct_sum({ket_bra(2, 0, 0), ket_bra(2, 1, 1)}), {2, 2});
  const Matrix plus = Matrix::Constant(2, 2, 0.5);
  Trial tr;
  for (const auto& g : c.groups) {
    const IndexPair idx{g[0], g[1]};
    const NormResult n = two_index_norm_unchecked(x, idx, c.config(4), {{plus, plus}});
    const double lower = std::pow(2.0, inverse_index(idx.p) - 1.0);
    const double formula = std::pow(2.0, inverse_index(idx.q));
    json entry = {{"q", idx.q},          {"p", idx.p},     {"computed", n.value},
                  {"lower_bound", lower}, {"block_formula", formula},
                  {"gap", n.value - formula}};
    tr.probes.push_back({lower - n.value, entry});
    add_note(tr, entry);
  }
  return tr;
}

Trial tensor_multiplicativity(const Context& c) {
  const Dims d = c.dims();
  Rng rng = c.rng("instance");
  const Matrix a = random_operator(d[0], c.rank(d[0]), rng);
  const Matrix b = random_operator(d[1], d[1], rng);
  const BipartiteOperator x(tensor(a, b), d);
  Trial tr;
  for (const auto& g : c.groups) {
    const IndexPair idx{g[0], g[1]};
    const double reference = schatten_norm(a, idx.q) * schatten_norm(b, idx.p);
    const double value = two_index_norm(x, idx, c.config(4)).value;
    tr.probes.push_back({rel_gap(value, reference),
                         {{"q", idx.q}, {"p", idx.p}, {"value", value}, {"reference", reference},
                          {"a", mat(a)}, {"b", mat(b)}}});
    add_note(tr, {{"q", idx.q}, {"p", idx.p}, {"value", value}, {"reference", reference}});
  }
  return tr;
}

Trial kappa_triangle(const Context& c) {
  const Dims d = c.dims();
  const int n = dims_product(d);
  Rng rng = c.rng("instance");
  Matrix x, y;
  if (c.trial % 2 == 0) {
    x = random_bipartite_psd(d[0], d[1], c.rank(n), rng).matrix;
    y = random_bipartite_psd(d[0], d[1], n, rng).matrix;
  } else {
    x = random_operator(n, c.rank(n), rng);
    y = random_operator(n, n, rng);
  }
  Trial tr;
  for (const auto& g : c.groups) {
    const IndexPair idx{g[0], g[1]};
    const double k = idx.kappa();
    // Sup-type values are lower bounds, so the right-hand side is the fragile one; inf-type
    // values are upper bounds and the left-hand side is.
    const bool sup = idx.sup_type();
    auto norm = [&](const Matrix& m, bool unsafe) {
      return two_index_norm(BipartiteOperator(m, d), idx, c.config(effort(unsafe))).value;
    };
    const double lhs = std::pow(norm(x + y, !sup), k);
    const double rhs = std::pow(norm(x, sup), k) + std::pow(norm(y, sup), k);
    tr.probes.push_back({excess(lhs, rhs),
                         {{"q", idx.q}, {"p", idx.p}, {"kappa", k}, {"lhs", lhs}, {"rhs", rhs},
                          {"x", mat(x)}, {"y", mat(y)}}});
    add_note(tr, {{"q", idx.q}, {"p", idx.p}, {"lhs", lhs}, {"rhs", rhs}});
  }
  return tr;
}

Trial local_isometry(const Context& c) {
  const Dims d = c.dims();
  const int n = dims_product(d);
  Rng rng = c.rng("instance");
  const Matrix x = random_operator(n, c.rank(n), rng);
  const Matrix u = isometry(d[0] + 1, d[0], rng), v = isometry(d[0] + 1, d[0], rng);
  const Matrix w = isometry(d[1] + 1, d[1], rng), z = isometry(d[1] + 1, d[1], rng);
  const BipartiteOperator left(tensor(u, identity(d[1])) * x * tensor(v, identity(d[1])).adjoint(),
                               {d[0] + 1, d[1]});
  const BipartiteOperator right(tensor(identity(d[0]), w) * x * tensor(identity(d[0]), z).adjoint(),
                                {d[0], d[1] + 1});
  Trial tr;
  for (const auto& g : c.groups) {
    const IndexPair idx{g[0], g[1]};
    const double base = two_index_norm(BipartiteOperator(x, d), idx, c.config(4)).value;
    const double vl = two_index_norm(left, idx, c.config(4)).value;
    const double vr = two_index_norm(right, idx, c.config(4)).value;
    const json info = {{"q", idx.q}, {"p", idx.p}, {"base", base}, {"first_factor", vl},
                       {"second_factor", vr}};
    json data = info;
    data["x"] = mat(x);
    tr.probes.push_back({rel_gap(vl, base), data});
    tr.probes.push_back({rel_gap(vr, base), data});
    add_note(tr, info);
  }
  return tr;
}

Trial relational_consistency(const Context& c) {
  const Dims d = c.dims();
  Rng rng = c.rng("instance");
  const BipartiteOperator x = random_bipartite_psd(d[0], d[1], c.rank(dims_product(d)), rng);
  Trial tr;
  for (const auto& g : c.groups) {
    const IndexTriple triple{g[0], g[1], g[2]};
    const double via = relational_factor_value(x, triple, c.config(4)).value;
    const double direct = two_index_norm(x, {triple.q, triple.t}, c.config(4)).value;
    const json info = {{"q", triple.q}, {"p", triple.p}, {"t", triple.t}, {"relational", via},
                       {"direct", direct}};
    json data = info;
    data["x"] = mat(x.matrix);
    tr.probes.push_back({rel_gap(via, direct), data});
    add_note(tr, info);
  }
  return tr;
}

Trial partial_trace_identity(const Context& c) {
  const Dims d = c.dims();
  Rng rng = c.rng("instance");
  const BipartiteOperator x = random_bipartite_psd(d[0], d[1], c.rank(dims_product(d)), rng);
  Trial tr;
  for (const auto& g : c.groups) {
    const double q = g[0];
    const double reference = schatten_norm(partial_trace(x, 1), q);
    const double value = two_index_norm(x, {q, 1.0}, c.config(4)).value;
    tr.probes.push_back({rel_gap(value, reference),
                         {{"q", q}, {"value", value}, {"reference", reference}, {"x", mat(x.matrix)}}});
    add_note(tr, {{"q", q}, {"value", value}, {"reference", reference}});
  }
  return tr;
}

Trial reverse_hoelder(const Context& c) {
  const Dims d = c.dims();
  const int n = dims_product(d);
  Rng rng = c.rng("instance");
  const BipartiteOperator x = random_bipartite_psd(d[0], d[1], c.rank(n), rng);
  const Matrix y = random_density(n, rng, n);
  auto dual = [](double e) { return e == 1.0 ? kInf : e / (1.0 - e); };
  Trial tr;
  for (const auto& g : c.groups) {
    const IndexPair idx{g[0], g[1]};
    const double norm = two_index_norm(x, idx, c.config(4)).value;
    const double variational = reverse_hoelder_value(x, idx, c.config(4)).value;
    // Any positive definite Y gives an upper bound on the norm.
    const double ny = two_index_norm(BipartiteOperator(y.inverse(), d), {dual(idx.q), dual(idx.p)},
                                     c.config(4))
                          .value;
    const double bound = (y * x.matrix).trace().real() * ny;
    const json info = {{"q", idx.q}, {"p", idx.p}, {"norm", norm}, {"variational", variational},
                       {"random_y_bound", bound}};
    json data = info;
    data["x"] = mat(x.matrix);
    tr.probes.push_back({rel_gap(variational, norm), data});
    data["y"] = mat(y);
    tr.probes.push_back({excess(norm, bound), data});
    add_note(tr, info);
  }
  return tr;
}

Trial minkowski(const Context& c) {
  const Dims d = c.dims(3);  // (E, Q, P)
  const int n = dims_product(d);
  Rng rng = c.rng("instance");
  const Matrix x = c.trial % 3 == 1 ? random_operator(n, n, rng)
                                    : random_bipartite_psd(d[0] * d[1], d[2], c.rank(n), rng).matrix;
  // (E, P, Q) grouped as (EP, Q).
  const BipartiteOperator moved(permute_systems(x, d, {0, 2, 1}), {d[0] * d[2], d[1]});
  Trial tr;
  for (const auto& g : c.groups) {
    const double q = g[0], p = g[1];
    // Both sides are sup-type lower bounds; the right-hand side is the fragile one.
    const double lhs = two_index_norm(moved, {p, q}, c.config(effort(false))).value;
    const double rhs = three_index_norm(BipartiteOperator(x, d), p, q, c.config(effort(true))).value;
    const json info = {{"q", q}, {"p", p}, {"swapped", lhs}, {"three_index", rhs}};
    json data = info;
    data["x"] = mat(x);
    tr.probes.push_back({excess(lhs, rhs), data});
    add_note(tr, info);
  }
  return tr;
}

Trial entropy_agreement(const Context& c) {
  const Dims d = c.dims();
  Rng rng = c.rng("instance");
  const State rho(random_bipartite_psd(d[0], d[1], c.rank(dims_product(d)), rng).matrix, d);
  OptimizerConfig direct = direct_config(c.sub_seed("direct"));
  direct.restarts = 8;
  const OptimizerConfig norm_cfg = c.config(4);
  Trial tr;
  for (const auto& g : c.groups) {
    const double alpha = g[0];
    auto probe = [&](const char* quantity, const EntropyResult& a, const EntropyResult& b) {
      const json info = {{"alpha", alpha}, {"quantity", quantity}, {"norm", a.value},
                         {"direct", b.value}};
      json data = info;
      data["rho"] = mat(rho.matrix);
      tr.probes.push_back({std::abs(a.value - b.value), data});
      add_note(tr, info);
    };
    probe("conditional", conditional_entropy_norm(rho, alpha, norm_cfg),
          conditional_entropy_direct(rho, alpha, direct));
    if (alpha < 1.0) {
      probe("reversed", reversed_conditional(rho, alpha, Method::NormBased, norm_cfg),
            reversed_conditional(rho, alpha, Method::Direct, direct));
      probe("umlaut", umlaut(rho, alpha, Method::NormBased, norm_cfg),
            umlaut(rho, alpha, Method::Direct, direct));
    }
  }
  return tr;
}

Trial entropy_bounds(const Context& c) {
  const Dims d = c.dims();
  const int da = d[0];
  Rng rng = c.rng("instance");
  const Matrix rho = c.trial % 4 == 0 ? entangled_state(da, d[1])
                                      : random_bipartite_psd(d[0], d[1], c.rank(dims_product(d)), rng).matrix;
  const double log_d = std::log(static_cast<double>(da));
  Trial tr;
  for (const auto& g : c.groups) {
    const double alpha = g[0];
    double h;
    json info = {{"alpha", alpha}};
    if (alpha < 1.0) {
      // The norm is a sup-type lower bound, so only the lower inequality is fragile.
      const auto [entropy, n] = cond_entropy_below_one(rho, d, alpha, c.config(8));
      h = entropy;
      const double na = std::pow(n, alpha);
      const double lo = std::pow(da, (alpha - 1.0) / alpha);
      const double hi = std::pow(da, (1.0 - alpha) / alpha);
      info["norm_power"] = na;
      info["lower"] = lo;
      info["upper"] = hi;
      json data = info;
      data["rho"] = mat(rho);
      tr.probes.push_back({(lo - na) / lo, data});
      tr.probes.push_back({excess(na, hi), data});
    } else {
      h = conditional_entropy_norm(State(rho, d), alpha, c.config(8)).value;
    }
    info["entropy"] = h;
    json data = info;
    data["rho"] = mat(rho);
    tr.probes.push_back({excess(std::abs(h), log_d), data});
    add_note(tr, info);
  }
  return tr;
}

Trial continuity_bound(const Context& c) {
  const Dims d = c.dims();
  const int n = dims_product(d);
  Rng rng = c.rng("instance");
  const Matrix rho = random_bipartite_psd(d[0], d[1], c.rank(n), rng).matrix;
  const Matrix tau = random_density(n, rng, n);
  const double mix[] = {0.01, 0.1, 0.5};
  const double t = mix[c.trial % 3];
  const Matrix sigma = (1.0 - t) * rho + t * tau;
  const double eps = 0.5 * schatten_norm(rho - sigma, 1.0);
  Trial tr;
  for (const auto& g : c.groups) {
    const double alpha = g[0];
    const double h_rho = cond_entropy_below_one(rho, d, alpha, c.config(8)).first;
    const double h_sigma = cond_entropy_below_one(sigma, d, alpha, c.config(8)).first;
    const double bound = std::log1p(2.0 * std::pow(eps, alpha) *
                                    std::pow(static_cast<double>(d[0]), 2.0 * (1.0 - alpha))) /
                         (1.0 - alpha);
    const double diff = std::abs(h_rho - h_sigma);
    const json info = {{"alpha", alpha}, {"epsilon", eps}, {"difference", diff}, {"bound", bound}};
    json data = info;
    data["rho"] = mat(rho);
    data["sigma"] = mat(sigma);
    tr.probes.push_back({diff - bound, data});
    add_note(tr, info);
  }
  return tr;
}

// Reference dimension for the product channel in the multiplicativity checks.
int product_env(const Context& c) { return static_cast<int>(c.option("product_env", 2.0)); }

Trial cb_supermult_conorm(const Context& c) {
  const CPMap phi = trial_channel(c, "phi"), psi = trial_channel(c, "psi");
  const CPMap both = tensor_maps(phi, psi);
  const OptimizerConfig cfg = chan_config(c, 8);
  Trial tr;
  for (const auto& g : c.groups) {
    const double q = g[0], p = g[1];
    // Conorm estimates are upper bounds; the product is the side slack pushes upwards.
    const ChannelNormResult a = cb_conorm_estimate(phi, q, p, 0, cfg);
    const ChannelNormResult b = cb_conorm_estimate(psi, q, p, 0, cfg);
    const ChannelNormResult ab = cb_conorm_estimate(both, q, p, product_env(c), cfg);
    const double rhs = a.value * b.value;
    const json info = {{"q", q}, {"p", p}, {"product_channel", ab.value}, {"product_of_values", rhs},
                       {"product_env", product_env(c)}};
    json data = info;
    data["phi"] = channel_to_json(phi);
    data["psi"] = channel_to_json(psi);
    tr.probes.push_back({(rhs - ab.value) / rhs, data});
    add_note(tr, info);
  }
  return tr;
}

Trial cb_submult_norm(const Context& c) {
  const CPMap phi = trial_channel(c, "phi"), psi = trial_channel(c, "psi");
  const CPMap both = tensor_maps(phi, psi);
  const OptimizerConfig cfg = chan_config(c, 8);
  Trial tr;
  for (const auto& g : c.groups) {
    const double q = g[0], p = g[1];
    // Norm estimates are lower bounds; restricting the product's reference only lowers it further.
    const ChannelNormResult a = cb_norm_estimate(phi, q, p, 0, cfg);
    const ChannelNormResult b = cb_norm_estimate(psi, q, p, 0, cfg);
    const ChannelNormResult ab = cb_norm_estimate(both, q, p, product_env(c), cfg);
    const double rhs = a.value * b.value;
    const json info = {{"q", q}, {"p", p}, {"product_channel", ab.value}, {"product_of_values", rhs},
                       {"product_env", product_env(c)}};
    json data = info;
    data["phi"] = channel_to_json(phi);
    data["psi"] = channel_to_json(psi);
    tr.probes.push_back({excess(ab.value, rhs), data});
    add_note(tr, info);
  }
  return tr;
}

Trial cb_flatness(const Context& c) {
  const CPMap phi = trial_channel(c, "phi", c.trial % 2 == 0 ? 2 : 3);
  const int e_max = static_cast<int>(c.option("env", 2.0));
  const OptimizerConfig cfg = chan_config(c, 8);
  Trial tr;
  for (const auto& g : c.groups) {
    const double q = g[0], p = g[1];
    auto probe = [&](const char* kind, const ChannelNormResult& r, bool norm) {
      const std::vector<double>& s = r.sweep_values;
      const double first = s.front();
      const double margin = norm ? (*std::max_element(s.begin(), s.end()) - first) / first
                                 : (first - *std::min_element(s.begin(), s.end())) / first;
      const json info = {{"q", q}, {"p", p}, {"kind", kind}, {"sweep", s}};
      json data = info;
      data["phi"] = channel_to_json(phi);
      tr.probes.push_back({margin, data});
      add_note(tr, info);
    };
    if (q >= 1.0 && p <= 1.0) probe("norm", cb_norm_estimate(phi, q, p, e_max, cfg), true);
    if (q <= 1.0 && p >= 1.0) probe("conorm", cb_conorm_estimate(phi, q, p, e_max, cfg), false);
  }
  return tr;
}

Trial replacer_counterexample(const Context& c) {
  const CPMap r = replacer_channel(2);
  const OptimizerConfig cfg = chan_config(c, 8);
  const ChannelNormResult cb = cb_norm_estimate(r, 0.5, 0.5, 2, cfg);
  const ChannelNormResult plain = mixed_norm_pos(r, 0.5, 0.5, cfg);
  const json info = {{"cb_value", cb.value}, {"sweep", cb.sweep_values}, {"plain_value", plain.value},
                     {"cb_lower", 4.0}, {"plain_exact", 2.0}};
  Trial tr;
  tr.probes.push_back({4.0 - cb.value, info});
  tr.probes.push_back({std::abs(plain.value - 2.0), info});
  tr.notes = info;
  return tr;
}

Trial max_output_additivity(const Context& c) {
  const CPMap phi = trial_channel(c, "phi"), psi = trial_channel(c, "psi");
  const CPMap both = tensor_maps(phi, psi);
  const OptimizerConfig cfg = chan_config(c, 8);
  Trial tr;
  for (const auto& g : c.groups) {
    const double p = g[0];
    // All three are sup estimates, hence lower bounds.
    const double s1 = max_output_entropy(phi, p, cfg);
    const double s2 = max_output_entropy(psi, p, cfg);
    const double s12 = max_output_entropy(both, p, cfg);
    const json info = {{"p", p}, {"joint", s12}, {"sum", s1 + s2}};
    json data = info;
    data["phi"] = channel_to_json(phi);
    data["psi"] = channel_to_json(psi);
    tr.probes.push_back({s12 - (s1 + s2), data});  // entangled inputs gain nothing
    tr.probes.push_back({(s1 + s2) - s12, data});  // product inputs are reachable
    add_note(tr, info);
  }
  return tr;
}

// H_p of (id (x) phi (x) psi) applied to the product of two single-channel witnesses.
double product_witness_entropy(const CPMap& phi, const CPMap& psi, const ChannelNormResult& a,
                               const ChannelNormResult& b, double p, const OptimizerConfig& cfg) {
  const int e1 = a.env_dim, e2 = b.env_dim;
  const Matrix in = permute_systems(tensor(a.witness_input, b.witness_input),
                                    {e1, phi.d_in, e2, psi.d_in}, {0, 2, 1, 3});
  const CPMap full = id_tensor(tensor_maps(phi, psi), e1 * e2);
  const Matrix out = apply_channel(full, in);
  const double n = two_index_norm(BipartiteOperator(out, {e1 * e2, phi.d_out * psi.d_out}), {1.0, p},
                                  cfg)
                       .value;
  return p / (1.0 - p) * std::log(n);
}

Trial min_output_additivity(const Context& c) {
  const CPMap phi = trial_channel(c, "phi"), psi = trial_channel(c, "psi");
  const CPMap both = tensor_maps(phi, psi);
  const OptimizerConfig cfg = chan_config(c, 8);
  Trial tr;
  for (const auto& g : c.groups) {
    const double p = g[0];
    // Infima: every estimate is an upper bound, and restricting the product's reference only raises
    // it, so the proved direction joint >= sum is safe against slack.
    const ChannelNormResult a = cb_conorm_estimate(phi, 1.0, p, 0, cfg);
    const ChannelNormResult b = cb_conorm_estimate(psi, 1.0, p, 0, cfg);
    const double k = p / (1.0 - p);
    const double s1 = k * std::log(a.value), s2 = k * std::log(b.value);
    const double s12 = cb_min_output_entropy(both, p, product_env(c), cfg);
    const double achieved = product_witness_entropy(phi, psi, a, b, p, c.config(4));
    const json info = {{"p", p},          {"joint", s12},      {"sum", s1 + s2},
                       {"product_witness", achieved},          {"product_env", product_env(c)}};
    json data = info;
    data["phi"] = channel_to_json(phi);
    data["psi"] = channel_to_json(psi);
    tr.probes.push_back({(s1 + s2) - s12, data});
    add_note(tr, info);
  }
  return tr;
}

Trial optimizer_support(const Context& c) {
  const Dims d = c.spec.dims.size() == 2 ? c.spec.dims : Dims{3, 2};
  Rng rng = c.rng("instance");
  // Compress the first factor to a random proper subspace so the marginal is rank deficient.
  const Matrix basis = isometry(d[0], d[0] - 1, rng);
  const Matrix proj = tensor(basis * basis.adjoint(), identity(d[1]));
  const Matrix y = random_bipartite_psd(d[0], d[1], dims_product(d), rng).matrix;
  const BipartiteOperator x(proj * y * proj, d);
  const Matrix support = marginal_support_projectors(x).first;
  const Matrix sb = support_basis(support);
  Trial tr;
  for (const auto& g : c.groups) {
    const IndexPair idx{g[0], g[1]};
    const NormResult n = two_index_norm(x, idx, c.config(4));
    const Matrix& u = n.witness_a;
    const double leak = (u - support * u * support).norm();
    const RealVector ev = herm_eig(sb.adjoint() * u * sb).eigenvalues;
    const double ratio = ev(0) / ev(ev.size() - 1);
    const double check = sandwich_objective(x, idx, u, n.witness_b);
    const json info = {{"q", idx.q}, {"p", idx.p}, {"leak", leak}, {"eigen_ratio", ratio},
                       {"value", n.value}, {"reevaluated", check}};
    json data = info;
    data["x"] = mat(x.matrix);
    tr.probes.push_back({leak, data});
    tr.probes.push_back({std::max(0.0, 1e-6 - ratio), data});
    tr.probes.push_back({rel_gap(check, n.value), data});
    add_note(tr, info);
  }
  return tr;
}

// Maximizes (sign = +1) or minimizes (sign = -1) f over R^2 by a grid and compass refinement.
double optimize_2d(const std::function<double(double, double)>& f, double sign) {
  double bx = 0.0, by = 0.0, best = sign * f(0.0, 0.0);
  for (double x = -12.0; x <= 12.0; x += 0.5)
    for (double y = -12.0; y <= 12.0; y += 0.5) {
      const double v = sign * f(x, y);
      if (v > best) best = v, bx = x, by = y;
    }
  for (double step = 0.25; step > 1e-12;) {
    bool moved = false;
    const double dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (const auto& dir : dirs) {
      const double v = sign * f(bx + step * dir[0], by + step * dir[1]);
      if (v > best) {
        best = v, bx += step * dir[0], by += step * dir[1];
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  return sign * best;
}

Trial amgm_rewrite(const Context& c) {
  Rng rng = c.rng("instance");
  std::uniform_real_distribution<double> logu(-2.0, 2.0), unit(0.05, 0.95), above(1.05, 3.0);
  Trial tr;
  {
    const double a = unit(rng), x = std::exp(logu(rng)), y = std::exp(logu(rng)), z = std::exp(logu(rng));
    const double m = amgm::weighted_mean(a, x, y, z), gm = amgm::weighted_geometric(a, x, y, z);
    tr.probes.push_back({excess(gm, m), {{"alpha", a}, {"x", x}, {"y", y}, {"z", z}}});
    const double b = above(rng);
    const double mr = amgm::weighted_mean(b, x, y, z), gr = amgm::weighted_geometric(b, x, y, z);
    tr.probes.push_back({(mr - gr) / gr, {{"alpha", b}, {"x", x}, {"y", y}, {"z", z}}});
  }
  for (const auto& g : c.groups) {
    const double r1 = g[0], r2 = g[1];
    const bool inf_case = r2 > 0.0;
    const double g0 = std::exp(logu(rng)), h0 = std::exp(logu(rng)), f0 = std::exp(logu(rng));
    // Scaling C by e^s and D by e^t.
    auto scaled = [&](double s, double t) {
      return std::array<double, 3>{g0 * std::exp(r1 * s), h0 * std::exp(r1 * t),
                                   f0 * std::exp(-r2 * (s + t))};
    };
    auto prod_at = [&](double s, double t) {
      const auto v = scaled(s, t);
      return amgm::product_form(v[0], v[1], v[2], r1, r2);
    };
    auto sum_at = [&](double s, double t) {
      const auto v = scaled(s, t);
      return amgm::sum_form(v[0], v[1], v[2], r1, r2);
    };
    const double prod = prod_at(0.0, 0.0);
    const json base = {{"r1", r1}, {"r2", r2}, {"g", g0}, {"h", h0}, {"f", f0}, {"product", prod}};
    for (int k = 0; k < 4; ++k) {
      const double s = 3.0 * logu(rng), t = 3.0 * logu(rng);
      const double sum = sum_at(s, t), p = prod_at(s, t);
      json data = base;
      data["s"] = s;
      data["t"] = t;
      // AM-GM orders the forms; the product form ignores the scaling.
      tr.probes.push_back({inf_case ? (p - sum) / p : (sum - p) / p, data});
      tr.probes.push_back({rel_gap(p, prod), data});
    }
    // Scales that equalize the three terms.
    const double lg = std::log(g0), lh = std::log(h0), lf = std::log(f0);
    const double s_eq = (lf - lg - r2 * (lg - lh) / r1) / (r1 + 2.0 * r2);
    const double t_eq = s_eq + (lg - lh) / r1;
    const double at_eq = sum_at(s_eq, t_eq);
    const double searched = optimize_2d(sum_at, inf_case ? -1.0 : 1.0);
    json data = base;
    data["equalized"] = at_eq;
    data["searched"] = searched;
    tr.probes.push_back({rel_gap(at_eq, prod), data});
    tr.probes.push_back({rel_gap(searched, prod), data});
    add_note(tr, data);
  }
  return tr;
}

double lp_vector(const Eigen::VectorXd& v, double p) {
  if (p == kInf) return v.maxCoeff();
  return std::pow(v.array().pow(p).sum(), 1.0 / p);
}

Trial hoelder_equality(const Context& c) {
  const int n = dims_product(c.dims());
  Rng rng = c.rng("instance");
  const Matrix x = random_operator(n, c.rank(n), rng);
  const Matrix y = random_operator(n, n, rng);
  const Matrix w = random_unitary(n, rng), u = random_unitary(n, rng);
  std::uniform_real_distribution<double> logu(-2.0, 1.0);
  Eigen::VectorXd dvals(n), vx(n), vy(n);
  for (int i = 0; i < n; ++i) {
    dvals(i) = std::exp(logu(rng));
    vx(i) = std::exp(logu(rng));
    vy(i) = std::exp(logu(rng));
  }
  Trial tr;
  for (const auto& g : c.groups) {
    const double q = g[0], p = g[1];
    const double r = 1.0 / (inverse_index(q) + inverse_index(p));
    const json idx = {{"q", q}, {"p", p}, {"r", r}};
    {
      const double lhs = schatten_norm(x * y, r), rhs = schatten_norm(x, q) * schatten_norm(y, p);
      json data = idx;
      data["x"] = mat(x);
      data["y"] = mat(y);
      tr.probes.push_back({excess(lhs, rhs), data});
    }
    {
      const Eigen::VectorXd dq = dvals.array().pow(inverse_index(q));
      const Eigen::VectorXd dp = dvals.array().pow(inverse_index(p));
      const Matrix ex = w * dq.cast<Complex>().asDiagonal() * w.adjoint() * u;
      const Matrix ey = u.adjoint() * w * dp.cast<Complex>().asDiagonal() * w.adjoint();
      const double lhs = schatten_norm(ex * ey, r), rhs = schatten_norm(ex, q) * schatten_norm(ey, p);
      json data = idx;
      data["lhs"] = lhs;
      data["rhs"] = rhs;
      tr.probes.push_back({rel_gap(lhs, rhs), data});
      add_note(tr, data);
      const Eigen::VectorXd eq = dq.cwiseProduct(dp);
      tr.probes.push_back({rel_gap(lp_vector(eq, r), lp_vector(dq, q) * lp_vector(dp, p)), idx});
    }
    {
      const double lhs = lp_vector(vx.cwiseProduct(vy), r), rhs = lp_vector(vx, q) * lp_vector(vy, p);
      tr.probes.push_back({excess(lhs, rhs), idx});
    }
  }
  return tr;
}

Trial lqlp_oracle_match(const Context& c) {
  const Dims d = c.dims();
  Rng rng = c.rng("instance");
  std::uniform_real_distribution<double> logu(-2.0, 1.0), phase(0.0, 2.0 * std::numbers::pi);
  Matrix v(d[0], d[1]);
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j) {
      const double mag = std::exp(logu(rng));
      v(i, j) = c.trial % 2 == 1 ? std::polar(mag, phase(rng)) : Complex(mag, 0.0);
    }
  if (c.trial % 3 == 2) v.row(0).setZero();
  Matrix diag = Matrix::Zero(d[0] * d[1], d[0] * d[1]);
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j) diag(i * d[1] + j, i * d[1] + j) = v(i, j);
  const BipartiteOperator x(diag, d);
  Trial tr;
  for (const auto& g : c.groups) {
    const IndexPair idx{g[0], g[1]};
    const double oracle = lqlp_oracle(v, idx.q, idx.p);
    const double value = two_index_norm(x, idx, c.config(4)).value;
    tr.probes.push_back({rel_gap(value, oracle),
                         {{"q", idx.q}, {"p", idx.p}, {"value", value}, {"oracle", oracle},
                          {"v", mat(v)}}});
    add_note(tr, {{"q", idx.q}, {"p", idx.p}, {"value", value}, {"oracle", oracle}});
  }
  return tr;
}

}  // namespace

const std::vector<CheckInfo>& registry() {
  static const std::vector<CheckInfo> checks = {
      {"block_diagonal", "block-diagonal operators have the l_q(S_p) norm of their blocks", 5e-3, 3, 2,
       {2, 1, 1, 2, 0.5, 1, 1.5, 0.75}, block_diagonal, compatible_pair},
      {"block_counterexample", "without compatibility the block formula fails on a 4x4 example", 1e-3, 1,
       2, {2, 1.0 / 3.0}, block_counterexample, incompatible_sup_pair},
      {"tensor_multiplicativity", "product operators have norm ||A||_q ||B||_p", 5e-3, 3, 2,
       {0.5, 1, 2, 1, 1, 2, 0.75, 1.5}, tensor_multiplicativity, compatible_pair},
      {"kappa_triangle", "kappa-th powers of the norm satisfy the triangle inequality", 5e-3, 3, 2,
       {0.5, 1, 0.75, 0.5, 2, 1, 1, 2}, kappa_triangle, compatible_pair},
      {"local_isometry", "norms are invariant under local isometries", 5e-3, 3, 2,
       {0.5, 1, 2, 1, 1, 2}, local_isometry, compatible_pair},
      {"relational_consistency", "compatible triples give the same norm through either route", 1e-2, 2,
       3, {0.5, 1, 0.75, 2, 1, 1.5, 0.5, 0.75, 1}, relational_consistency, compatible_triple},
      {"partial_trace_identity", "(q,1) norms of PSD operators are q-norms of the partial trace", 5e-3,
       3, 1, {0.5, 0.75, 2}, partial_trace_identity, positive_single},
      {"reverse_hoelder", "PSD norms with indices <= 1 have the reverse Hoelder form", 1e-2, 2, 2,
       {0.5, 0.75, 0.75, 0.5, 0.5, 1, 1, 0.5}, reverse_hoelder, sub_unit_pair},
      {"minkowski", "swapping adjacent systems contracts into the three-indexed norm", 1e-2, 2, 2,
       {0.5, 1, 0.75, 1, 1, 2}, minkowski, ordered_pair},
      {"entropy_agreement", "norm and direct routes give the same entropies", 5e-3, 2, 1,
       {0.5, 0.75, 2}, entropy_agreement, entropy_alpha},
      {"entropy_bounds", "the (1,alpha) norm and the conditional entropy are bounded by d_A", 5e-3, 3, 1,
       {0.5, 0.75, 0.9, 2}, entropy_bounds, entropy_alpha},
      {"continuity_bound", "conditional entropies are continuous in trace distance", 1e-2, 3, 1,
       {0.5, 0.75, 0.9}, continuity_bound, entropy_alpha_below_one},
      {"cb_supermult_conorm", "cb conorms are supermultiplicative for q >= p", 1e-2, 2, 2,
       {1, 0.5, 0.75, 0.5, 1, 0.75}, cb_supermult_conorm, cb_descending_pair},
      {"cb_submult_norm", "cb norms are submultiplicative for q <= p", 1e-2, 2, 2,
       {1, 2, 1, 1.5, 1.5, 2}, cb_submult_norm, cb_ascending_pair},
      {"cb_flatness", "cb values equal plain values when 1 separates q and p", 1e-2, 2, 2,
       {1, 0.5, 1.5, 0.75, 0.75, 2, 1, 2}, cb_flatness, flat_pair},
      {"replacer_counterexample", "the replacer channel separates cb and plain norms at q = p = 1/2",
       1e-3, 1, 0, {}, replacer_counterexample, nullptr},
      {"max_output_additivity", "maximal output entropies add under tensor products", 1e-2, 2, 1,
       {0.5, 0.75, 2}, max_output_additivity, output_entropy_p},
      {"min_output_additivity", "cb minimal output entropies add under tensor products", 1e-2, 2, 1,
       {0.5, 0.75}, min_output_additivity, min_entropy_p},
      {"optimizer_support", "sup-type optimizers have full rank on the marginal support", 1e-9, 3, 2,
       {2, 1, 1.5, 0.75}, optimizer_support, support_pair},
      {"amgm_rewrite", "products of homogeneous terms optimize like their weighted sums", 1e-3, 10, 2,
       {1, 1, 2, 0.5, 0.5, 3, 4, -1, 3, -1, 6, -2}, amgm_rewrite, amgm_pair},
      {"hoelder_equality", "Hoelder's inequality and its equality case", 1e-3, 10, 2,
       {1, 1, 2, 2, 0.5, 1, 0.75, 1.5, 2, kInf}, hoelder_equality, holder_pair},
      {"lqlp_oracle_match", "diagonal operators have the classical l_q(l_p) norm", 5e-3, 3, 2,
       {0.5, 1, 2, 1, 1, 2, 0.75, 1.5, 1, 0.5, 2, 3}, lqlp_oracle_match, compatible_pair},
  };
  return checks;
}

}  // namespace sqp::verify_detail
