#include "schatten_qp/entropy.hpp"

#include <cmath>
#include <sstream>

#include "kernel.hpp"
#include "schatten_qp/qnorm.hpp"

namespace sqp {

State::State(Matrix m, Dims d) : matrix(std::move(m)), dims(std::move(d)) {
  if (dims.empty()) dims = {static_cast<int>(matrix.rows())};
  BipartiteOperator check(matrix, dims);
  if (!is_psd(matrix)) throw InvalidState("state is not positive semidefinite");
  const double tr = matrix.trace().real();
  if (std::abs(tr - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "state trace is " << tr << ", expected 1";
    throw InvalidState(msg.str());
  }
  matrix = hermitian_part(matrix);
}

std::string method_name(Method m) { return m == Method::NormBased ? "norm-based" : "direct"; }

void require_alpha(double alpha, double lo, double hi, bool lo_inclusive) {
  std::ostringstream msg;
  if (std::isnan(alpha) || (lo_inclusive ? alpha < lo : alpha <= lo) || alpha > hi) {
    msg << "alpha = " << alpha << " outside the allowed range";
    throw BadIndex(msg.str());
  }
  if (std::abs(alpha - 1.0) < 1e-3) {
    msg << "alpha = " << alpha << " is within 1e-3 of 1";
    throw BadIndex(msg.str());
  }
}

namespace {

// alpha/(alpha-1), with the alpha = inf limit.
double prefactor(double alpha) { return alpha == kInf ? 1.0 : alpha / (alpha - 1.0); }
// (1-alpha)/(2 alpha), with the alpha = inf limit.
double sandwich_exponent(double alpha) { return alpha == kInf ? -0.5 : (1.0 - alpha) / (2.0 * alpha); }

// log ||P M P||_alpha for PSD M and Hermitian P.
double log_sandwich(const Matrix& p, const Matrix& m, double alpha) {
  const detail::ThinSvd t = detail::thin_svd(p * m * p, true);
  return detail::log_schatten(t.sigma, alpha);
}

Matrix clamped_power(const Matrix& m, double t) {
  return detail::spectral_power(detail::spectral(m, 1e-300), t);
}

void require_two(const State& s) {
  if (s.dims.size() != 2) throw ShapeMismatch("bipartite state expected");
}

EntropyResult from_norm(double value, const Matrix& witness, double factor) {
  EntropyResult r;
  r.method = Method::NormBased;
  r.witness = witness;
  if (value <= 0.0) {
    r.infinite = true;
    r.value = factor > 0 ? -kInf : kInf;
  } else {
    r.value = factor * std::log(value);
  }
  return r;
}

// Minimizes f over one density block of size k.
MultiStartResult minimize_density(int k, const std::function<double(const Matrix&)>& f,
                                  const OptimizerConfig& cfg, std::uint64_t stream) {
  OptimizerConfig c = cfg;
  c.finite_difference = true;
  Objective obj = [&f](const Point& pt, Point* g) {
    if (g) g->clear();  // gradients come from finite differences
    return f(pt[0]);
  };
  return multi_start_minimize(obj, default_starts({k}, c, stream), c, true);
}

}  // namespace

Divergence sandwiched_divergence(const Matrix& rho, const Matrix& sigma, double alpha) {
  require_alpha(alpha, 0.5, kInf, true);
  require_square(rho, "rho");
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw ShapeMismatch("rho and sigma must have equal shapes");
  Divergence d;
  const double t = sandwich_exponent(alpha);
  if (alpha > 1.0) {
    const Matrix proj = support_projector(sigma);
    const Matrix outside = rho - proj * rho * proj;
    if (outside.cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, rho.cwiseAbs().maxCoeff())) {
      d.value = kInf;
      d.support_violation = true;
      return d;
    }
  }
  const double lv = log_sandwich(matrix_power(sigma, t), rho, alpha);
  if (!std::isfinite(lv)) {
    d.value = kInf;
    d.support_violation = true;
    return d;
  }
  d.value = prefactor(alpha) * lv;
  return d;
}

OptimizerConfig direct_config(std::uint64_t seed) {
  OptimizerConfig c;
  c.restarts = 16;
  c.seed = seed;
  c.finite_difference = true;
  c.tol_obj = 1e-12;
  return c;
}

EntropyResult conditional_entropy_norm(const State& rho_ab, double alpha,
                                       const OptimizerConfig& cfg) {
  require_two(rho_ab);
  require_alpha(alpha, 0.5, kInf, true);
  const BipartiteOperator rho_ba(permute_systems(rho_ab.matrix, rho_ab.dims, {1, 0}),
                                 {rho_ab.dims[1], rho_ab.dims[0]});
  const NormResult n = two_index_norm(rho_ba, {1.0, alpha}, cfg);
  return from_norm(n.value, n.witness_a, -prefactor(alpha));
}

EntropyResult conditional_entropy_direct(const State& rho_ab, double alpha,
                                         const OptimizerConfig& cfg) {
  require_two(rho_ab);
  require_alpha(alpha, 0.5, kInf, true);
  const int da = rho_ab.dims[0], db = rho_ab.dims[1];
  const double t = sandwich_exponent(alpha);
  const double pre = prefactor(alpha);
  auto divergence = [&](const Matrix& sigma) {
    const Matrix p = tensor(identity(da), clamped_power(sigma, t));
    const double lv = log_sandwich(p, rho_ab.matrix, alpha);
    return std::isfinite(lv) ? pre * lv : kInf;
  };
  const MultiStartResult r = minimize_density(db, divergence, cfg, 10);
  EntropyResult out;
  out.method = Method::Direct;
  out.value = -r.best.f;
  out.witness = r.best.x[0];
  out.infinite = !std::isfinite(out.value);
  return out;
}

EntropyResult reversed_conditional(const State& sigma_ab, double alpha, Method method,
                                   const OptimizerConfig& cfg) {
  require_two(sigma_ab);
  require_alpha(alpha, 0.0, 1.0, false);
  const double beta = alpha / (1.0 - alpha);
  const int da = sigma_ab.dims[0], db = sigma_ab.dims[1];
  if (method == Method::NormBased) {
    const Matrix sba = permute_systems(sigma_ab.matrix, sigma_ab.dims, {1, 0});
    const BipartiteOperator z(matrix_power(sba, 1.0 / beta), {db, da});
    const NormResult n = two_index_norm(z, {beta, alpha}, cfg);
    return from_norm(n.value, n.witness_a, beta);
  }
  // sup over rho_B of -D_alpha(1_A (x) rho_B || sigma_AB).
  const Matrix p = matrix_power(sigma_ab.matrix, sandwich_exponent(alpha));
  const double pre = prefactor(alpha);
  auto divergence = [&](const Matrix& rho) {
    const double lv = log_sandwich(p, tensor(identity(da), hermitian_part(rho)), alpha);
    return std::isfinite(lv) ? pre * lv : kInf;
  };
  const MultiStartResult r = minimize_density(db, divergence, cfg, 11);
  EntropyResult out;
  out.method = Method::Direct;
  out.value = -r.best.f;
  out.witness = r.best.x[0];
  out.infinite = !std::isfinite(out.value);
  return out;
}

namespace {

// (1_B (x) rho_A^(1/2)) rho_BA^gamma (1_B (x) rho_A^(1/2)) on (B, A).
BipartiteOperator umlaut_operator(const State& rho_ab, double gamma) {
  const int da = rho_ab.dims[0], db = rho_ab.dims[1];
  const Matrix rho_a = partial_trace(rho_ab.matrix, rho_ab.dims, 1);
  const Matrix sqrt_a = tensor(identity(db), matrix_power(rho_a, 0.5));
  const Matrix rho_ba = permute_systems(rho_ab.matrix, rho_ab.dims, {1, 0});
  return BipartiteOperator(sqrt_a * matrix_power(rho_ba, gamma) * sqrt_a, {db, da});
}

}  // namespace

EntropyResult umlaut(const State& rho_ab, double alpha, Method method, const OptimizerConfig& cfg) {
  require_two(rho_ab);
  require_alpha(alpha, 0.0, 1.0, false);
  const double beta = alpha / (1.0 - alpha);
  if (method == Method::NormBased) {
    const NormResult n = two_index_norm(umlaut_operator(rho_ab, 1.0 / beta), {beta, alpha}, cfg);
    return from_norm(n.value, n.witness_a, -beta);
  }
  const int db = rho_ab.dims[1];
  const Matrix rho_a = partial_trace(rho_ab.matrix, rho_ab.dims, 1);
  const Matrix p = matrix_power(rho_ab.matrix, sandwich_exponent(alpha));
  const double pre = prefactor(alpha);
  auto divergence = [&](const Matrix& sigma) {
    const double lv = log_sandwich(p, tensor(rho_a, hermitian_part(sigma)), alpha);
    return std::isfinite(lv) ? pre * lv : kInf;
  };
  const MultiStartResult r = minimize_density(db, divergence, cfg, 12);
  EntropyResult out;
  out.method = Method::Direct;
  out.value = r.best.f;
  out.witness = r.best.x[0];
  out.infinite = !std::isfinite(out.value);
  return out;
}

double umlaut_log_norm(const State& rho_ab, double gamma, const OptimizerConfig& cfg) {
  require_two(rho_ab);
  if (!(gamma >= 0.0)) throw BadIndex("gamma must be non-negative");
  const double q = gamma == 0.0 ? kInf : 1.0 / gamma;
  OptimizerConfig c = cfg;
  c.restarts = 0;
  c.tol_obj = 1e-15;
  c.max_iters = std::max(cfg.max_iters, 5000);
  const NormResult n = two_index_norm(umlaut_operator(rho_ab, gamma), {q, 1.0 / (1.0 + gamma)}, c);
  return std::log(n.value);
}

double umlaut_limit(const State& rho_ab, const OptimizerConfig& cfg) {
  require_two(rho_ab);
  const RealVector ev = herm_eig(rho_ab.matrix).eigenvalues;
  if (ev(0) <= 1e-10 * ev(ev.size() - 1))
    throw RankDeficient("umlaut limit needs a full-rank state");
  const double h = 1e-2;
  double d[3];
  for (int i = 0; i < 3; ++i) {
    const double g = h / std::pow(2.0, i);
    d[i] = umlaut_log_norm(rho_ab, g, cfg) / g;
  }
  // Slopes carry an O(gamma) error; two Richardson levels remove the first two orders.
  const double r1a = 2.0 * d[1] - d[0];
  const double r1b = 2.0 * d[2] - d[1];
  const double r2 = (4.0 * r1b - r1a) / 3.0;
  return -r2;
}

double renyi_entropy(const Matrix& rho, double p) {
  require_alpha(p, 0.0, kInf, false);
  RealVector ev = herm_eig(rho).eigenvalues;
  if (ev.minCoeff() < -1e-9) throw InvalidState("state is not positive semidefinite");
  ev = ev.cwiseMax(0.0);
  if (p == kInf) return -std::log(ev.maxCoeff());
  double acc = 0.0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > 0.0) acc += std::pow(ev(i), p);
  return std::log(acc) / (1.0 - p);
}

}  // namespace sqp
