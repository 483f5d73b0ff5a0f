#include "kernel.hpp"

#include <algorithm>
#include <cmath>

namespace sqp::detail {

Spectral spectral(const Matrix& u, double clamp_min) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(u));
  Spectral sp{es.eigenvalues(), es.eigenvectors()};
  for (int i = 0; i < sp.lam.size(); ++i) sp.lam(i) = std::max(sp.lam(i), clamp_min);
  return sp;
}

Matrix spectral_power(const Spectral& sp, double s) {
  const RealVector f = sp.lam.array().pow(s);
  return sp.vecs * f.asDiagonal() * sp.vecs.adjoint();
}

namespace {

// (x^s - y^s) / (x - y) without cancellation; s * x^(s-1) on the diagonal.
double divided_power(double x, double y, double s) {
  if (x == y) return s * std::pow(x, s - 1.0);
  const double lo = std::min(x, y), hi = std::max(x, y);
  const double rel = (hi - lo) / lo;
  return std::pow(lo, s) * std::expm1(s * std::log1p(rel)) / (hi - lo);
}

}  // namespace

Matrix power_adjoint(const Spectral& sp, double s, const Matrix& h) {
  const int k = static_cast<int>(sp.lam.size());
  Matrix hp = sp.vecs.adjoint() * h * sp.vecs;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) hp(i, j) *= divided_power(sp.lam(i), sp.lam(j), s);
  return hermitian_part(sp.vecs * hp * sp.vecs.adjoint());
}

Matrix kron_identity(const Matrix& a, int d2) {
  Matrix out = Matrix::Zero(a.rows() * d2, a.cols() * d2);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (int t = 0; t < d2; ++t) out(i * d2 + t, j * d2 + t) = a(i, j);
  return out;
}

Matrix trace_second(const Matrix& m, int kr, int kc, int d2) {
  Matrix out(kr, kc);
  for (int i = 0; i < kr; ++i)
    for (int j = 0; j < kc; ++j) {
      Complex acc = 0.0;
      for (int t = 0; t < d2; ++t) acc += m(i * d2 + t, j * d2 + t);
      out(i, j) = acc;
    }
  return out;
}

ThinSvd thin_svd(const Matrix& y, bool hermitian_psd, double cut) {
  ThinSvd t;
  if (hermitian_psd) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(y));
    const RealVector& ev = es.eigenvalues();
    const int n = static_cast<int>(ev.size());
    const double top = n ? ev(n - 1) : 0.0;
    std::vector<int> keep;
    for (int i = n - 1; i >= 0; --i)
      if (top > 0.0 && ev(i) > cut * top) keep.push_back(i);
    t.w.resize(y.rows(), keep.size());
    t.sigma.resize(keep.size());
    for (size_t c = 0; c < keep.size(); ++c) {
      t.w.col(c) = es.eigenvectors().col(keep[c]);
      t.sigma(c) = ev(keep[c]);
    }
    t.z = t.w;
    return t;
  }
  Eigen::JacobiSVD<Matrix> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sv = svd.singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  int r = 0;
  while (r < sv.size() && top > 0.0 && sv(r) > cut * top) ++r;
  t.w = svd.matrixU().leftCols(r);
  t.z = svd.matrixV().leftCols(r);
  t.sigma = sv.head(r);
  return t;
}

double log_schatten(const RealVector& sigma, double p) {
  if (sigma.size() == 0) return -kInf;
  const double top = sigma.maxCoeff();
  if (!(top > 0.0)) return -kInf;
  if (p == kInf) return std::log(top);
  double acc = 0.0;
  for (int i = 0; i < sigma.size(); ++i) acc += std::pow(sigma(i) / top, p);
  return std::log(top) + std::log(acc) / p;
}

Matrix log_schatten_gradient(const ThinSvd& t, double p) {
  const int r = static_cast<int>(t.sigma.size());
  if (r == 0) return Matrix::Zero(t.z.rows(), t.w.rows());
  const double top = t.sigma.maxCoeff();
  RealVector w = RealVector::Zero(r);
  if (p == kInf) {
    int arg = 0;
    t.sigma.maxCoeff(&arg);
    w(arg) = 1.0 / top;
  } else {
    double acc = 0.0;
    for (int i = 0; i < r; ++i) acc += std::pow(t.sigma(i) / top, p);
    for (int i = 0; i < r; ++i) w(i) = std::pow(t.sigma(i) / top, p - 1.0) / (top * acc);
  }
  return t.z * w.asDiagonal() * t.w.adjoint();
}

SandwichKernel::SandwichKernel(const Matrix& x, int d1, int d2, double s, double p, bool symmetric)
    : d1_(d1), d2_(d2), s_(s), p_(p), symmetric_(symmetric) {
  const Dims dims{d1, d2};
  if (symmetric_) {
    ql_ = support_basis(hermitian_part(partial_trace(x, dims, 1)));
    qr_ = ql_;
  } else {
    ql_ = support_basis(hermitian_part(partial_trace(x * x.adjoint(), dims, 1)));
    qr_ = support_basis(hermitian_part(partial_trace(x.adjoint() * x, dims, 1)));
  }
  kl_ = static_cast<int>(ql_.cols());
  kr_ = static_cast<int>(qr_.cols());
  if (kl_ == 0 || kr_ == 0) {
    zero_ = true;
    return;
  }
  xr_ = kron_identity(ql_.adjoint(), d2) * x * kron_identity(qr_, d2);
  if (symmetric_) {
    const ThinSvd t = thin_svd(xr_, true);
    f0_ = t.w * t.sigma.cwiseSqrt().asDiagonal();
    h0_ = f0_;
  } else {
    const ThinSvd t = thin_svd(xr_, false);
    f0_ = t.w * t.sigma.asDiagonal();
    h0_ = t.z;
  }
  if (f0_.cols() == 0) zero_ = true;
}

double SandwichKernel::evaluate(const Matrix& u, const Matrix& v, Matrix* grad_u, Matrix* grad_v,
                                Matrix* grad_x) const {
  if (zero_) return -kInf;
  const Spectral su = spectral(u);
  const Matrix a = kron_identity(spectral_power(su, s_), d2_);
  Spectral sv;
  Matrix b;
  ThinSvd t;
  if (symmetric_) {
    const Matrix f = a * f0_;
    // Y = F F^dagger; the SVD of F keeps small eigenvalues of Y to high relative accuracy.
    Eigen::JacobiSVD<Matrix> svd(f, Eigen::ComputeThinU);
    const RealVector& sf = svd.singularValues();
    int r = 0;
    while (r < sf.size() && sf(0) > 0.0 && sf(r) > 1e-15 * sf(0)) ++r;
    t.sigma = sf.head(r).cwiseAbs2();
    t.w = svd.matrixU().leftCols(r);
    t.z = t.w;
    b = a;
  } else {
    sv = spectral(v);
    b = kron_identity(spectral_power(sv, s_), d2_);
    // Y = F H^dagger with F = a f0, H = b h0; the SVD of the small core avoids structural zeros.
    const Matrix f = a * f0_, h = b * h0_;
    const int r = static_cast<int>(f.cols());
    Eigen::HouseholderQR<Matrix> qf(f), qh(h);
    const Matrix q1 = qf.householderQ() * Matrix::Identity(f.rows(), r);
    const Matrix q2 = qh.householderQ() * Matrix::Identity(h.rows(), r);
    const Matrix r1 = qf.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    const Matrix r2 = qh.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Matrix> svd(r1 * r2.adjoint(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RealVector& sv = svd.singularValues();
    int keep = 0;
    while (keep < r && sv(0) > 0.0 && sv(keep) > 1e-15 * sv(0)) ++keep;
    t.sigma = sv.head(keep);
    t.w = q1 * svd.matrixU().leftCols(keep);
    t.z = q2 * svd.matrixV().leftCols(keep);
  }
  const double value = log_schatten(t.sigma, p_);
  if (!grad_u && !grad_v && !grad_x) return value;
  const Matrix m = log_schatten_gradient(t, p_);
  if (grad_u || grad_v) {
    const Matrix da = hermitian_part(trace_second(xr_ * b * m, kl_, kl_, d2_));
    const Matrix db = hermitian_part(trace_second(m * a * xr_, kr_, kr_, d2_));
    if (symmetric_) {
      if (grad_u) *grad_u = power_adjoint(su, s_, da + db);
    } else {
      if (grad_u) *grad_u = power_adjoint(su, s_, da);
      if (grad_v) *grad_v = power_adjoint(sv, s_, db);
    }
  }
  if (grad_x) {
    *grad_x = kron_identity(qr_, d2_) * (b * m * a) * kron_identity(ql_.adjoint(), d2_);
  }
  return value;
}

KernelSolve solve_kernel(const SandwichKernel& k, bool maximize, const std::vector<Point>& starts,
                         const OptimizerConfig& cfg, bool parallel) {
  KernelSolve out;
  if (k.is_zero()) {
    out.log_value = -kInf;
    return out;
  }
  const bool sym = k.symmetric();
  const double sign = maximize ? -1.0 : 1.0;
  Objective f = [&](const Point& x, Point* g) {
    Matrix gu, gv;
    const double v = k.evaluate(x[0], sym ? x[0] : x[1], g ? &gu : nullptr,
                                (g && !sym) ? &gv : nullptr, nullptr);
    if (!std::isfinite(v)) return kInf;
    if (g) {
      g->clear();
      g->push_back(sign * gu);
      if (!sym) g->push_back(sign * gv);
    }
    return sign * v;
  };
  const MultiStartResult r = multi_start_minimize(f, starts, cfg, parallel);
  out.log_value = sign * r.best.f;
  out.u = r.best.x[0];
  out.v = sym ? r.best.x[0] : r.best.x[1];
  out.iterations = r.best.iterations;
  out.converged = r.best.converged;
  out.best_start = r.best_start;
  for (double v : r.start_values) out.start_values.push_back(sign * v);
  return out;
}

OptimizerConfig inner_config(const OptimizerConfig& outer) {
  OptimizerConfig c = outer;
  c.restarts = 0;
  c.tol_obj = std::min(outer.tol_obj, 1e-13);
  c.max_iters = std::max(outer.max_iters, 2000);
  c.finite_difference = false;
  c.floor = 1e-12;
  return c;
}

LogNorm log_norm(const Matrix& x, int d1, int d2, double q, double p, bool psd,
                 const OptimizerConfig& inner_cfg, WarmStart* warm, bool want_grad) {
  LogNorm out;
  // Equal indices, or a trivial factor, reduce to a single Schatten norm.
  if (q == p || d1 == 1 || d2 == 1) {
    const double index = d2 == 1 ? q : p;
    const ThinSvd t = thin_svd(x, psd);
    out.log_value = log_schatten(t.sigma, index);
    if (want_grad) out.grad = log_schatten_gradient(t, index);
    out.u = out.v = identity(d1) / static_cast<double>(d1);
    return out;
  }
  const bool sup = q > p;
  const double s = 0.5 * std::abs(inverse_index(q) - inverse_index(p)) * (sup ? 1.0 : -1.0);
  const SandwichKernel k(x, d1, d2, s, p, psd);
  if (k.is_zero()) {
    out.log_value = -kInf;
    if (want_grad) out.grad = Matrix::Zero(x.rows(), x.cols());
    return out;
  }
  Point start;
  if (warm && warm->valid && warm->u.rows() == d1) {
    start.push_back(project_spectraplex(k.reduce_left(warm->u), inner_cfg.floor));
    if (!psd) start.push_back(project_spectraplex(k.reduce_right(warm->v), inner_cfg.floor));
  } else {
    start.push_back(identity(k.kl()) / static_cast<double>(k.kl()));
    if (!psd) start.push_back(identity(k.kr()) / static_cast<double>(k.kr()));
  }
  const KernelSolve ks = solve_kernel(k, sup, {start}, inner_cfg, false);
  out.log_value = ks.log_value;
  out.iterations = ks.iterations;
  out.converged = ks.converged;
  out.u = k.expand_left(ks.u);
  out.v = k.expand_right(ks.v);
  if (want_grad) k.evaluate(ks.u, ks.v, nullptr, nullptr, &out.grad);
  if (warm) {
    warm->u = out.u;
    warm->v = out.v;
    warm->valid = true;
  }
  return out;
}

void sandwich_chain(const Matrix& x, const Spectral& su, const Spectral& sv, double s, int rest,
                    const Matrix& a_full, const Matrix& b_full, const Matrix& gy, Matrix* gu,
                    Matrix* gv) {
  const int k = static_cast<int>(su.lam.size());
  const Matrix da = hermitian_part(trace_second(x * b_full * gy, k, k, rest));
  const Matrix db = hermitian_part(trace_second(gy * a_full * x, k, k, rest));
  if (gv) {
    *gu += power_adjoint(su, s, da);
    *gv += power_adjoint(sv, s, db);
  } else {
    *gu += power_adjoint(su, s, da + db);
  }
}

}  // namespace sqp::detail
