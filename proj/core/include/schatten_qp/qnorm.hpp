#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "schatten_qp/linalg.hpp"
#include "schatten_qp/optimizer.hpp"

namespace sqp {

inline constexpr double kCompatSlack = 1e-12;

// Index pair (q on the first factor, p on the second), each in (0, inf].
struct IndexPair {
  double q = 1.0;
  double p = 1.0;

  double r_inv() const { return std::abs(inverse_index(q) - inverse_index(p)); }
  bool compatible() const { return r_inv() <= 1.0 + kCompatSlack; }
  double kappa() const;
  bool sup_type() const { return q > p; }
  bool inf_type() const { return q < p; }
  void require_positive() const;      // BadIndex
  void require_compatible() const;    // IncompatibleIndices
};

struct IndexTriple {
  double q = 1.0;
  double p = 1.0;
  double t = 1.0;
  bool compatible() const;
};

struct NormResult {
  double value = 0.0;
  Matrix witness_a;  // trace-one u with a = u^(1/2r), first-factor coordinates
  Matrix witness_b;
  int iterations = 0;
  bool converged = true;
  std::vector<double> restart_values;
};

// ||X||_(q,p). Sup-type (q > p) results are lower bounds, inf-type (q < p) upper bounds.
NormResult two_index_norm(const BipartiteOperator& x, IndexPair idx, const OptimizerConfig& cfg = {});

// Sup-form optimization without the compatibility check, for probing incompatible indices.
// Extra starts are trace-one first-factor matrices (u, v).
NormResult two_index_norm_unchecked(const BipartiteOperator& x, IndexPair idx,
                                    const OptimizerConfig& cfg,
                                    const std::vector<std::pair<Matrix, Matrix>>& extra_starts = {});

// ||(u^s (x) 1) X (v^s (x) 1)||_p with s = +1/2r for q > p and -1/2r for q < p. Powers act on
// supports; u, v should have unit trace. No compatibility check.
double sandwich_objective(const BipartiteOperator& x, IndexPair idx, const Matrix& u, const Matrix& v);

// Closed form (sum_i (sum_j |v_ij|^p)^(q/p))^(1/q); rows index the first factor.
double lqlp_oracle(const Matrix& v, double q, double p);

// (||X||_q, variational value at the explicit optimizers built from the SVD of X).
std::pair<double, double> schatten_variational_check(const Matrix& x, double q, double p,
                                                     const OptimizerConfig& cfg = {});

// Special 3-indexed norm sup_{a,b on P} ||a_P X b_P||_(PQ:q, R:p) / (||a||_2r ||b||_2r), q <= p.
NormResult three_index_norm(const BipartiteOperator& x, double p, double q,
                            const OptimizerConfig& cfg = {});

// inf_{Y >= 0} Tr[Y X] ||Y^-1||_(q/(1-q), p/(1-p)) for PSD X and 0 < q, p <= 1.
NormResult reverse_hoelder_value(const BipartiteOperator& x, IndexPair idx,
                                 const OptimizerConfig& cfg = {});

// ||X||_(q,t) computed through the (p,t) norm of (a (x) 1) X (b (x) 1).
NormResult relational_factor_value(const BipartiteOperator& x, IndexTriple triple,
                                   const OptimizerConfig& cfg = {});

// Scalar product/sum rewritings used to turn products of homogeneous terms into sums.
namespace amgm {

// Weighted AM-GM: alpha x + (1-alpha)/2 (y + z) against x^alpha (yz)^((1-alpha)/2).
double weighted_mean(double alpha, double x, double y, double z);
double weighted_geometric(double alpha, double x, double y, double z);

// Exponents r0 with 1/r0 = 2/r1 + 1/r2.
double r0(double r1, double r2);
// Product form g^(r0/r1) h^(r0/r1) f^(r0/r2) and sum form r0/r1 g + r0/r1 h + r0/r2 f.
double product_form(double g, double h, double f, double r1, double r2);
double sum_form(double g, double h, double f, double r1, double r2);

}  // namespace amgm

}  // namespace sqp
