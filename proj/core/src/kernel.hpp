#pragma once

// Internal evaluation kernels shared by qnorm, entropy and channels.

#include <vector>

#include "schatten_qp/linalg.hpp"
#include "schatten_qp/optimizer.hpp"

namespace sqp::detail {

// Eigendecomposition of a Hermitian block with eigenvalues clamped away from zero.
struct Spectral {
  RealVector lam;
  Matrix vecs;
};
Spectral spectral(const Matrix& u, double clamp_min = 1e-18);
Matrix spectral_power(const Spectral& sp, double s);
// Gradient in u of Re Tr[H u^s] for Hermitian H (Daleckii-Krein divided differences).
Matrix power_adjoint(const Spectral& sp, double s, const Matrix& h);

Matrix kron_identity(const Matrix& a, int d2);
// Sum over the second factor of a (kr*d2) x (kc*d2) matrix.
Matrix trace_second(const Matrix& m, int kr, int kc, int d2);

// Thin singular data of Y = W diag(sigma) Z^dagger restricted to its nonzero part.
struct ThinSvd {
  Matrix w, z;
  RealVector sigma;
};
ThinSvd thin_svd(const Matrix& y, bool hermitian_psd, double cut = 1e-13);

// log ||Y||_p from singular values, and the matrix M with d log||Y||_p = Re Tr[M dY].
double log_schatten(const RealVector& sigma, double p);
Matrix log_schatten_gradient(const ThinSvd& t, double p);

// log ||(u^s (x) 1) X (v^s (x) 1)||_p on the marginal supports of X.
class SandwichKernel {
 public:
  SandwichKernel(const Matrix& x, int d1, int d2, double s, double p, bool symmetric);

  bool is_zero() const { return zero_; }
  bool symmetric() const { return symmetric_; }
  int kl() const { return kl_; }
  int kr() const { return kr_; }
  int d1() const { return d1_; }
  int d2() const { return d2_; }
  const Matrix& left_basis() const { return ql_; }
  const Matrix& right_basis() const { return qr_; }

  // Reduced coordinates (kl x kl / kr x kr). grad_x is the gradient with respect to the full X.
  double evaluate(const Matrix& u, const Matrix& v, Matrix* grad_u, Matrix* grad_v,
                  Matrix* grad_x) const;

  Matrix reduce_left(const Matrix& full) const { return ql_.adjoint() * full * ql_; }
  Matrix reduce_right(const Matrix& full) const { return qr_.adjoint() * full * qr_; }
  Matrix expand_left(const Matrix& u) const { return ql_ * u * ql_.adjoint(); }
  Matrix expand_right(const Matrix& v) const { return qr_ * v * qr_.adjoint(); }

 private:
  int d1_, d2_, kl_ = 0, kr_ = 0;
  double s_, p_;
  bool symmetric_;
  bool zero_ = false;
  Matrix ql_, qr_;
  Matrix xr_;       // reduced X
  Matrix f0_, h0_;  // X_reduced = f0 h0^dagger (symmetric: h0 == f0)
};

struct KernelSolve {
  double log_value = 0.0;
  Matrix u, v;  // reduced coordinates
  int iterations = 0;
  bool converged = true;
  int best_start = 0;
  std::vector<double> start_values;  // log values
};

// Optimizes the kernel from the given starts (reduced coordinates). maximize selects the sup form.
KernelSolve solve_kernel(const SandwichKernel& k, bool maximize, const std::vector<Point>& starts,
                         const OptimizerConfig& cfg, bool parallel);

// Warm start for repeated inner solves, in full first-factor coordinates.
struct WarmStart {
  Matrix u, v;
  bool valid = false;
};

struct LogNorm {
  double log_value = 0.0;
  Matrix grad;  // d log||X|| = Re Tr[grad dX]
  Matrix u, v;  // inner optimizers, full coordinates
  int iterations = 0;
  bool converged = true;
};

// Inner-solve configuration used by nested optimizations.
OptimizerConfig inner_config(const OptimizerConfig& outer);

// log ||X||_(q,p) with Danskin gradient. Closed form when q == p. psd selects a = b.
LogNorm log_norm(const Matrix& x, int d1, int d2, double q, double p, bool psd,
                 const OptimizerConfig& inner_cfg, WarmStart* warm, bool want_grad);

// Adds the contribution of a sandwich Y = (a (x) 1) X (b (x) 1) to gradients in u, v where
// a = u^s, b = v^s, given dL = Re Tr[gy dY]. Works for any factor count after the first.
void sandwich_chain(const Matrix& x, const Spectral& su, const Spectral& sv, double s, int rest,
                    const Matrix& a_full, const Matrix& b_full, const Matrix& gy, Matrix* gu,
                    Matrix* gv);

}  // namespace sqp::detail
