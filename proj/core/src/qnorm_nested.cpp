// Norms computed by an outer optimization around an inner two-indexed norm.

#include <cmath>
#include <memory>

#include "kernel.hpp"
#include "schatten_qp/qnorm.hpp"

namespace sqp {

namespace {

using detail::LogNorm;
using detail::Spectral;
using detail::WarmStart;

struct OuterSpec {
  int k;           // first-factor dimension carrying a, b
  int rest;        // product of the remaining factor dimensions
  double s;        // a = u^s
  bool maximize;
  bool symmetric;  // a = b
};

// Outer optimization over (u[, v]) of L(Y) with Y = (u^s (x) 1) X (v^s (x) 1), where
// inner(Y, warm, want_grad) returns log value and gradient in Y.
template <class Inner>
NormResult optimize_outer(const Matrix& x, const OuterSpec& spec, const OptimizerConfig& cfg,
                          Inner inner) {
  const double sign = spec.maximize ? -1.0 : 1.0;
  auto factory = [&]() -> Objective {
    auto warm = std::make_shared<WarmStart>();
    return [&, warm](const Point& pt, Point* g) {
      const Spectral su = detail::spectral(pt[0]);
      const Matrix a = detail::kron_identity(detail::spectral_power(su, spec.s), spec.rest);
      Spectral sv = su;
      Matrix b = a;
      if (!spec.symmetric) {
        sv = detail::spectral(pt[1]);
        b = detail::kron_identity(detail::spectral_power(sv, spec.s), spec.rest);
      }
      const LogNorm ln = inner(a * x * b, warm.get(), g != nullptr);
      if (!std::isfinite(ln.log_value)) return kInf;
      if (g) {
        Matrix gu = Matrix::Zero(spec.k, spec.k), gv = gu;
        detail::sandwich_chain(x, su, sv, spec.s, spec.rest, a, b, ln.grad, &gu,
                               spec.symmetric ? nullptr : &gv);
        g->clear();
        g->push_back(sign * gu);
        if (!spec.symmetric) g->push_back(sign * gv);
      }
      return sign * ln.log_value;
    };
  };
  std::vector<int> blocks{spec.k};
  if (!spec.symmetric) blocks.push_back(spec.k);
  const auto starts = default_starts(blocks, cfg, 1);
  const MultiStartResult r = multi_start_minimize(factory, starts, cfg, true);

  NormResult out;
  out.value = std::exp(sign * r.best.f);
  out.witness_a = r.best.x[0];
  out.witness_b = spec.symmetric ? r.best.x[0] : r.best.x[1];
  out.iterations = r.best.iterations;
  out.converged = r.best.converged;
  for (double v : r.start_values) out.restart_values.push_back(std::exp(sign * v));
  return out;
}

}  // namespace

NormResult relational_factor_value(const BipartiteOperator& x, IndexTriple triple,
                                   const OptimizerConfig& cfg) {
  if (x.factors() != 2) throw ShapeMismatch("relational factor value needs two factors");
  for (double v : {triple.q, triple.p, triple.t}) IndexPair{v, 1.0}.require_positive();
  if (!triple.compatible()) throw IncompatibleIndices("index triple is not pairwise compatible");
  cfg.validate();
  const IndexPair outer{triple.q, triple.p};
  if (triple.q == triple.p) return two_index_norm(x, {triple.p, triple.t}, cfg);

  const int d1 = x.dims[0], d2 = x.dims[1];
  const bool psd = is_psd(x.matrix);
  const OptimizerConfig icfg = detail::inner_config(cfg);
  OuterSpec spec{d1, d2, 0.5 * outer.r_inv() * (outer.sup_type() ? 1.0 : -1.0), outer.sup_type(), psd};
  return optimize_outer(x.matrix, spec, cfg, [&](const Matrix& y, WarmStart* warm, bool grad) {
    return detail::log_norm(y, d1, d2, triple.p, triple.t, psd, icfg, warm, grad);
  });
}

NormResult three_index_norm(const BipartiteOperator& x, double p, double q,
                            const OptimizerConfig& cfg) {
  if (x.factors() != 3) throw ShapeMismatch("three-indexed norm needs factors (P, Q, R)");
  const IndexPair idx{q, p};
  idx.require_positive();
  if (q > p) throw BadIndex("three-indexed norm is defined here for q <= p");
  idx.require_compatible();
  cfg.validate();
  if (q == p) {
    NormResult r;
    r.value = schatten_norm(x.matrix, p);
    r.witness_a = r.witness_b = identity(x.dims[0]) / static_cast<double>(x.dims[0]);
    r.restart_values = {r.value};
    return r;
  }
  const int dp = x.dims[0], dq = x.dims[1], dr = x.dims[2];
  const bool psd = is_psd(x.matrix);
  const OptimizerConfig icfg = detail::inner_config(cfg);
  OuterSpec spec{dp, dq * dr, 0.5 * idx.r_inv(), true, psd};
  return optimize_outer(x.matrix, spec, cfg, [&](const Matrix& y, WarmStart* warm, bool grad) {
    return detail::log_norm(y, dp * dq, dr, q, p, psd, icfg, warm, grad);
  });
}

NormResult reverse_hoelder_value(const BipartiteOperator& x, IndexPair idx,
                                 const OptimizerConfig& cfg) {
  if (x.factors() != 2) throw ShapeMismatch("reverse Hoelder value needs two factors");
  idx.require_positive();
  if (idx.q > 1.0 || idx.p > 1.0) throw BadIndex("reverse Hoelder needs 0 < q, p <= 1");
  idx.require_compatible();
  cfg.validate();
  if (!is_psd(x.matrix)) throw NotPsd("reverse Hoelder value needs a PSD operator");
  const int d1 = x.dims[0], d2 = x.dims[1];
  auto dual = [](double e) { return e == 1.0 ? kInf : e / (1.0 - e); };
  const double qd = dual(idx.q), pd = dual(idx.p);

  const Matrix basis = support_basis(x.matrix);
  const int k = static_cast<int>(basis.cols());
  if (k == 0) {
    NormResult r;
    r.witness_a = r.witness_b = Matrix::Zero(x.matrix.rows(), x.matrix.cols());
    r.restart_values = {0.0};
    return r;
  }
  const Matrix xr = basis.adjoint() * x.matrix * basis;
  const OptimizerConfig icfg = detail::inner_config(cfg);

  // Y lives on the support of X with unit trace; the objective is scale invariant.
  auto solve = [&](double qi, double pi, const std::vector<Point>& starts) {
    auto factory = [&, qi, pi]() -> Objective {
      auto warm = std::make_shared<WarmStart>();
      return [&, qi, pi, warm](const Point& pt, Point* g) {
        const Spectral sy = detail::spectral(pt[0]);
        const Matrix yinv = detail::spectral_power(sy, -1.0);
        const double tr = (pt[0] * xr).trace().real();
        if (!(tr > 0.0)) return kInf;
        const Matrix z = basis * yinv * basis.adjoint();
        const LogNorm ln = detail::log_norm(z, d1, d2, qi, pi, true, icfg, warm.get(), g != nullptr);
        if (!std::isfinite(ln.log_value)) return kInf;
        if (g) {
          const Matrix gz = basis.adjoint() * ln.grad * basis;
          g->clear();
          g->push_back(hermitian_part(xr / tr - yinv * gz * yinv));
        }
        return std::log(tr) + ln.log_value;
      };
    };
    return multi_start_minimize(factory, starts, cfg, true);
  };
  MultiStartResult r = solve(qd, pd, default_starts({k}, cfg, 2));
  if (qd == kInf || pd == kInf) {
    // The infinite index makes the objective nonsmooth at the optimum and the plain run stalls.
    // Finite surrogates trace a smooth path towards it; each stage is re-scored exactly.
    std::vector<Point> path = {r.best.x};
    for (double big : {16.0, 64.0, 256.0}) {
      const MultiStartResult s =
          solve(qd == kInf ? big : qd, pd == kInf ? big : pd, {path.back()});
      path.push_back(s.best.x);
    }
    const MultiStartResult polished = solve(qd, pd, path);
    r.total_iterations += polished.total_iterations;
    if (polished.best.f < r.best.f) r.best = polished.best;
  }

  NormResult out;
  out.value = std::exp(r.best.f);
  out.witness_a = basis * r.best.x[0] * basis.adjoint();
  out.witness_b = out.witness_a;
  out.iterations = r.best.iterations;
  out.converged = r.best.converged;
  for (double v : r.start_values) out.restart_values.push_back(std::exp(v));
  return out;
}

}  // namespace sqp
