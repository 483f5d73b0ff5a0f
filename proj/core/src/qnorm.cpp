#include "schatten_qp/qnorm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kernel.hpp"

namespace sqp {

double IndexPair::kappa() const { return std::min({q, p, 1.0}); }

void IndexPair::require_positive() const {
  if (!(q > 0.0) || !(p > 0.0) || std::isnan(q) || std::isnan(p))
    throw BadIndex("indices must lie in (0, inf]");
}

void IndexPair::require_compatible() const {
  if (!compatible()) {
    std::ostringstream msg;
    msg << "incompatible indices (q, p) = (" << q << ", " << p << "): need |1/q - 1/p| <= 1, got "
        << r_inv();
    throw IncompatibleIndices(msg.str());
  }
}

bool IndexTriple::compatible() const {
  const IndexPair a{q, p}, b{q, t}, c{p, t};
  return a.compatible() && b.compatible() && c.compatible();
}

namespace {

void require_two_factors(const BipartiteOperator& x) {
  if (x.factors() != 2) throw ShapeMismatch("two-indexed norm needs exactly two factors");
}

NormResult flat_result(int d1, double value) {
  NormResult r;
  r.value = value;
  r.witness_a = r.witness_b = identity(d1) / static_cast<double>(d1);
  r.restart_values = {value};
  return r;
}

NormResult solve_two_index(const BipartiteOperator& x, IndexPair idx, const OptimizerConfig& cfg,
                           const std::vector<std::pair<Matrix, Matrix>>& extra_starts) {
  const int d1 = x.dims[0], d2 = x.dims[1];
  if (x.matrix.cwiseAbs().maxCoeff() == 0.0) return flat_result(d1, 0.0);
  if (idx.q == idx.p) return flat_result(d1, schatten_norm(x.matrix, idx.p));

  const bool psd = is_psd(x.matrix);
  const bool sup = idx.sup_type();
  const double s = 0.5 * idx.r_inv() * (sup ? 1.0 : -1.0);
  const detail::SandwichKernel kernel(x.matrix, d1, d2, s, idx.p, psd);
  if (kernel.is_zero()) return flat_result(d1, 0.0);

  std::vector<int> blocks{kernel.kl()};
  if (!psd) blocks.push_back(kernel.kr());
  std::vector<Point> starts = default_starts(blocks, cfg, 0);
  for (const auto& [u, v] : extra_starts) {
    Point pt{kernel.reduce_left(u)};
    if (!psd) pt.push_back(kernel.reduce_right(v));
    starts.push_back(pt);
  }
  const detail::KernelSolve ks = detail::solve_kernel(kernel, sup, starts, cfg, true);

  NormResult r;
  r.value = std::exp(ks.log_value);
  r.witness_a = kernel.expand_left(ks.u);
  r.witness_b = kernel.expand_right(ks.v);
  r.iterations = ks.iterations;
  r.converged = ks.converged;
  for (double lv : ks.start_values) r.restart_values.push_back(std::exp(lv));
  return r;
}

}  // namespace

NormResult two_index_norm(const BipartiteOperator& x, IndexPair idx, const OptimizerConfig& cfg) {
  require_two_factors(x);
  idx.require_positive();
  idx.require_compatible();
  cfg.validate();
  return solve_two_index(x, idx, cfg, {});
}

NormResult two_index_norm_unchecked(const BipartiteOperator& x, IndexPair idx,
                                    const OptimizerConfig& cfg,
                                    const std::vector<std::pair<Matrix, Matrix>>& extra_starts) {
  require_two_factors(x);
  idx.require_positive();
  cfg.validate();
  return solve_two_index(x, idx, cfg, extra_starts);
}

double sandwich_objective(const BipartiteOperator& x, IndexPair idx, const Matrix& u,
                          const Matrix& v) {
  require_two_factors(x);
  idx.require_positive();
  const double s = 0.5 * idx.r_inv() * (idx.sup_type() ? 1.0 : -1.0);
  const int d2 = x.dims[1];
  const Matrix a = tensor(matrix_power(u, s), identity(d2));
  const Matrix b = tensor(matrix_power(v, s), identity(d2));
  return schatten_norm(a * x.matrix * b, idx.p);
}

double lqlp_oracle(const Matrix& v, double q, double p) {
  IndexPair{q, p}.require_positive();
  auto lp = [](const RealVector& w, double e) {
    if (w.size() == 0) return 0.0;
    if (e == kInf) return w.maxCoeff();
    double acc = 0.0;
    for (int i = 0; i < w.size(); ++i) acc += std::pow(w(i), e);
    return std::pow(acc, 1.0 / e);
  };
  RealVector rows(v.rows());
  for (Eigen::Index i = 0; i < v.rows(); ++i) rows(i) = lp(v.row(i).cwiseAbs().transpose(), p);
  return lp(rows, q);
}

std::pair<double, double> schatten_variational_check(const Matrix& x, double q, double p,
                                                     const OptimizerConfig&) {
  require_square(x, "variational check input");
  require_finite(x, "variational check input");
  const IndexPair idx{q, p};
  idx.require_positive();
  if (q == kInf || p == kInf) throw BadIndex("variational check needs finite indices");
  idx.require_compatible();
  const double lhs = schatten_norm(x, q);
  if (q == p) return {lhs, schatten_norm(x, p)};

  // Optimizers a = U D^s U^dagger, b = V D^s V^dagger with s = q / 2r, from X = U D V^dagger.
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector d = svd.singularValues();
  const Matrix& uu = svd.matrixU();
  const Matrix& vv = svd.matrixV();
  const double rinv = idx.r_inv();
  const double s = 0.5 * q * rinv;
  const double two_r = 2.0 / rinv;
  const double cut = d.size() ? 1e-10 * d(0) : 0.0;
  RealVector dp(d.size()), dm(d.size());
  for (int i = 0; i < d.size(); ++i) {
    const bool on = d(i) > cut;
    dp(i) = on ? std::pow(d(i), s) : 0.0;
    dm(i) = on ? std::pow(d(i), -s) : 0.0;
  }
  const Matrix a = uu * dp.asDiagonal() * uu.adjoint();
  const Matrix b = vv * dp.asDiagonal() * vv.adjoint();
  const double na = schatten_norm(a, two_r), nb = schatten_norm(b, two_r);
  double rhs;
  if (q < p) {
    const Matrix ai = uu * dm.asDiagonal() * uu.adjoint();
    const Matrix bi = vv * dm.asDiagonal() * vv.adjoint();
    rhs = na * nb * schatten_norm(ai * x * bi, p);
  } else {
    rhs = schatten_norm(a * x * b, p) / (na * nb);
  }
  return {lhs, rhs};
}

namespace amgm {

double weighted_mean(double alpha, double x, double y, double z) {
  return alpha * x + 0.5 * (1.0 - alpha) * (y + z);
}

double weighted_geometric(double alpha, double x, double y, double z) {
  return std::pow(x, alpha) * std::pow(y * z, 0.5 * (1.0 - alpha));
}

double r0(double r1, double r2) { return 1.0 / (2.0 / r1 + 1.0 / r2); }

double product_form(double g, double h, double f, double r1, double r2) {
  const double r = r0(r1, r2);
  return std::pow(g, r / r1) * std::pow(h, r / r1) * std::pow(f, r / r2);
}

double sum_form(double g, double h, double f, double r1, double r2) {
  const double r = r0(r1, r2);
  return r / r1 * g + r / r1 * h + r / r2 * f;
}

}  // namespace amgm

}  // namespace sqp
