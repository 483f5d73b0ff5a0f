#pragma once

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include "schatten_qp/errors.hpp"

namespace sqp {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Dims = std::vector<int>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// 1/p with 1/inf == 0 exactly.
inline double inverse_index(double p) { return p == kInf ? 0.0 : 1.0 / p; }

struct PsdTolerance {
  double rank_cutoff_rel = 1e-10;  // eigenvalues below this times lambda_max count as zero
  double eig_tol = 1e-9;           // allowed negativity / asymmetry, relative to the scale of M
};

struct HermitianEigen {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // columns
};

// Operator on a tensor product of factors with the given dimensions.
struct BipartiteOperator {
  Matrix matrix;
  Dims dims;

  BipartiteOperator() = default;
  BipartiteOperator(Matrix m, Dims d);
  int factors() const { return static_cast<int>(dims.size()); }
};

int dims_product(const Dims& dims);

// Row-major construction with finiteness check.
Matrix make_matrix(int rows, int cols, const std::vector<Complex>& row_major);
void require_finite(const Matrix& m, const char* what);
void require_square(const Matrix& m, const char* what);

Matrix identity(int d);
Matrix ket_bra(int d, int i, int j);
Matrix max_entangled(int d);  // projector onto sum_i |ii>/sqrt(d)

bool is_hermitian(const Matrix& m, double tol = 1e-9);
Matrix hermitian_part(const Matrix& m);
bool is_psd(const Matrix& m, const PsdTolerance& tol = {});

HermitianEigen herm_eig(const Matrix& m, double tol = 1e-9);

// Spectral power of a PSD matrix; eigenvalues under the rank cutoff are zero for every t,
// so negative t gives the power on the support.
Matrix matrix_power(const Matrix& a, double t, const PsdTolerance& tol = {});
Matrix pinv(const Matrix& a, const PsdTolerance& tol = {});
Matrix support_projector(const Matrix& a, const PsdTolerance& tol = {});
// Isometry whose columns span the support of a PSD matrix.
Matrix support_basis(const Matrix& a, const PsdTolerance& tol = {});

// Left and right marginal support projectors on the first factor.
std::pair<Matrix, Matrix> marginal_support_projectors(const BipartiteOperator& x,
                                                      const PsdTolerance& tol = {});

RealVector singular_values(const Matrix& x);
double schatten_from_singular(const RealVector& s, double p);
double schatten_norm(const Matrix& x, double p);

// Trace out factor `which` (0-based).
Matrix partial_trace(const Matrix& x, const Dims& dims, int which);
Matrix partial_trace(const BipartiteOperator& x, int which);

Matrix tensor(const Matrix& a, const Matrix& b);
Matrix tensor(std::initializer_list<Matrix> factors);

// Factor k of the result is factor perm[k] of the input.
Matrix permute_systems(const Matrix& x, const Dims& dims, const std::vector<int>& perm);
BipartiteOperator permute_systems(const BipartiteOperator& x, const std::vector<int>& perm);
Dims permute_dims(const Dims& dims, const std::vector<int>& perm);
std::vector<int> inverse_permutation(const std::vector<int>& perm);

Matrix direct_sum(const std::vector<Matrix>& blocks);

}  // namespace sqp
