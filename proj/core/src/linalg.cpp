#include "schatten_qp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sqp {

int dims_product(const Dims& dims) {
  int n = 1;
  for (int d : dims) {
    if (d < 1) throw ShapeMismatch("factor dimensions must be positive");
    n *= d;
  }
  return n;
}

BipartiteOperator::BipartiteOperator(Matrix m, Dims d) : matrix(std::move(m)), dims(std::move(d)) {
  if (dims.empty()) throw ShapeMismatch("operator needs at least one factor");
  const int n = dims_product(dims);
  if (matrix.rows() != n || matrix.cols() != n) {
    throw ShapeMismatch("factor dimensions multiply to " + std::to_string(n) + " but matrix is " +
                        std::to_string(matrix.rows()) + "x" + std::to_string(matrix.cols()));
  }
  require_finite(matrix, "operator");
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw NonFinite(std::string(what) + " has non-finite entries");
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) throw ShapeMismatch(std::string(what) + " must be square");
}

Matrix make_matrix(int rows, int cols, const std::vector<Complex>& row_major) {
  if (rows < 0 || cols < 0 || row_major.size() != static_cast<size_t>(rows) * cols) {
    throw ShapeMismatch("entry count does not match rows x cols");
  }
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = row_major[static_cast<size_t>(i) * cols + j];
  require_finite(m, "matrix");
  return m;
}

Matrix identity(int d) { return Matrix::Identity(d, d); }

Matrix ket_bra(int d, int i, int j) {
  Matrix m = Matrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

Matrix max_entangled(int d) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d * d);
  for (int i = 0; i < d; ++i) psi(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return psi * psi.adjoint();
}

namespace {

double scale_of(const Matrix& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

}  // namespace

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale_of(m);
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

HermitianEigen herm_eig(const Matrix& m, double tol) {
  require_square(m, "herm_eig input");
  require_finite(m, "herm_eig input");
  if (!is_hermitian(m, tol)) throw NotHermitian("matrix is not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
  if (es.info() != Eigen::Success) throw NoConvergence("Hermitian eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

bool is_psd(const Matrix& m, const PsdTolerance& tol) {
  if (!is_hermitian(m, tol.eig_tol)) return false;
  if (m.size() == 0) return true;
  const RealVector ev = herm_eig(m, tol.eig_tol).eigenvalues;
  return ev(0) >= -tol.eig_tol * std::max(1.0, ev.cwiseAbs().maxCoeff());
}

namespace {

// Eigendecomposition of a PSD matrix with the near-zero spectrum flagged.
struct PsdSpectrum {
  HermitianEigen eig;
  std::vector<bool> on_support;
};

PsdSpectrum psd_spectrum(const Matrix& a, const PsdTolerance& tol) {
  PsdSpectrum s{herm_eig(a, tol.eig_tol), {}};
  const RealVector& ev = s.eig.eigenvalues;
  const int n = static_cast<int>(ev.size());
  s.on_support.assign(n, false);
  if (n == 0) return s;
  const double lmax = ev(n - 1);
  const double neg_floor = -tol.eig_tol * std::max(1.0, std::abs(lmax));
  if (ev(0) < neg_floor) throw NotPsd("matrix has eigenvalue " + std::to_string(ev(0)));
  const double cut = tol.rank_cutoff_rel * std::max(lmax, 0.0);
  for (int i = 0; i < n; ++i) s.on_support[i] = lmax > 0.0 && ev(i) > cut;
  return s;
}

}  // namespace

Matrix matrix_power(const Matrix& a, double t, const PsdTolerance& tol) {
  const PsdSpectrum s = psd_spectrum(a, tol);
  const int n = static_cast<int>(a.rows());
  RealVector f = RealVector::Zero(n);
  for (int i = 0; i < n; ++i)
    if (s.on_support[i]) f(i) = std::pow(s.eig.eigenvalues(i), t);
  const Matrix& v = s.eig.eigenvectors;
  return v * f.asDiagonal() * v.adjoint();
}

Matrix pinv(const Matrix& a, const PsdTolerance& tol) { return matrix_power(a, -1.0, tol); }

Matrix support_projector(const Matrix& a, const PsdTolerance& tol) {
  return matrix_power(a, 0.0, tol);
}

Matrix support_basis(const Matrix& a, const PsdTolerance& tol) {
  const PsdSpectrum s = psd_spectrum(a, tol);
  const int n = static_cast<int>(a.rows());
  const int k = static_cast<int>(std::count(s.on_support.begin(), s.on_support.end(), true));
  Matrix basis(n, k);
  int col = 0;
  // Largest eigenvalues first keeps the basis ordering stable.
  for (int i = n - 1; i >= 0; --i)
    if (s.on_support[i]) basis.col(col++) = s.eig.eigenvectors.col(i);
  return basis;
}

std::pair<Matrix, Matrix> marginal_support_projectors(const BipartiteOperator& x,
                                                      const PsdTolerance& tol) {
  if (x.factors() != 2) throw ShapeMismatch("marginal supports need exactly two factors");
  const Matrix left = partial_trace(x.matrix * x.matrix.adjoint(), x.dims, 1);
  const Matrix right = partial_trace(x.matrix.adjoint() * x.matrix, x.dims, 1);
  return {support_projector(hermitian_part(left), tol), support_projector(hermitian_part(right), tol)};
}

RealVector singular_values(const Matrix& x) {
  if (x.size() == 0) return RealVector();
  if (x.rows() <= 16 && x.cols() <= 16) {
    Eigen::JacobiSVD<Matrix> svd(x);
    return svd.singularValues();
  }
  Eigen::BDCSVD<Matrix> svd(x);
  return svd.singularValues();
}

double schatten_from_singular(const RealVector& s, double p) {
  if (!(p > 0.0)) throw BadIndex("Schatten index must be positive");
  if (s.size() == 0) return 0.0;
  const double smax = s.maxCoeff();
  if (smax <= 0.0) return 0.0;
  if (p == kInf) return smax;
  double acc = 0.0;
  for (int i = 0; i < s.size(); ++i) acc += std::pow(s(i) / smax, p);
  return smax * std::pow(acc, 1.0 / p);
}

double schatten_norm(const Matrix& x, double p) {
  if (!(p > 0.0)) throw BadIndex("Schatten index must be positive");
  require_finite(x, "schatten_norm input");
  return schatten_from_singular(singular_values(x), p);
}

Matrix partial_trace(const Matrix& x, const Dims& dims, int which) {
  const int n = dims_product(dims);
  if (x.rows() != n || x.cols() != n) throw ShapeMismatch("partial_trace: dims do not match matrix");
  if (which < 0 || which >= static_cast<int>(dims.size()))
    throw ShapeMismatch("partial_trace: factor index out of range");
  int before = 1, after = 1;
  for (int k = 0; k < which; ++k) before *= dims[k];
  for (int k = which + 1; k < static_cast<int>(dims.size()); ++k) after *= dims[k];
  const int dw = dims[which];
  const int m = before * after;
  Matrix out = Matrix::Zero(m, m);
  for (int i1 = 0; i1 < before; ++i1)
    for (int i2 = 0; i2 < after; ++i2)
      for (int j1 = 0; j1 < before; ++j1)
        for (int j2 = 0; j2 < after; ++j2) {
          Complex acc = 0.0;
          for (int k = 0; k < dw; ++k)
            acc += x((i1 * dw + k) * after + i2, (j1 * dw + k) * after + j2);
          out(i1 * after + i2, j1 * after + j2) = acc;
        }
  return out;
}

Matrix partial_trace(const BipartiteOperator& x, int which) {
  return partial_trace(x.matrix, x.dims, which);
}

Matrix tensor(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix tensor(std::initializer_list<Matrix> factors) {
  Matrix out = Matrix::Ones(1, 1);
  for (const Matrix& f : factors) out = tensor(out, f);
  return out;
}

namespace {

void check_permutation(const std::vector<int>& perm, size_t k) {
  if (perm.size() != k) throw ShapeMismatch("permutation length must equal factor count");
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i < k; ++i)
    if (sorted[i] != static_cast<int>(i)) throw ShapeMismatch("invalid permutation");
}

}  // namespace

Dims permute_dims(const Dims& dims, const std::vector<int>& perm) {
  check_permutation(perm, dims.size());
  Dims out(dims.size());
  for (size_t k = 0; k < dims.size(); ++k) out[k] = dims[perm[k]];
  return out;
}

std::vector<int> inverse_permutation(const std::vector<int>& perm) {
  std::vector<int> inv(perm.size());
  for (size_t k = 0; k < perm.size(); ++k) inv[perm[k]] = static_cast<int>(k);
  return inv;
}

Matrix permute_systems(const Matrix& x, const Dims& dims, const std::vector<int>& perm) {
  const int n = dims_product(dims);
  if (x.rows() != n || x.cols() != n) throw ShapeMismatch("permute_systems: dims do not match matrix");
  const Dims new_dims = permute_dims(dims, perm);
  const int k = static_cast<int>(dims.size());
  // Map each new flat index to the old flat index.
  std::vector<int> old_stride(k), map(n);
  int stride = 1;
  for (int f = k - 1; f >= 0; --f) {
    old_stride[f] = stride;
    stride *= dims[f];
  }
  for (int idx = 0; idx < n; ++idx) {
    int rem = idx, old = 0;
    for (int f = k - 1; f >= 0; --f) {
      const int digit = rem % new_dims[f];
      rem /= new_dims[f];
      old += digit * old_stride[perm[f]];
    }
    map[idx] = old;
  }
  Matrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = x(map[i], map[j]);
  return out;
}

BipartiteOperator permute_systems(const BipartiteOperator& x, const std::vector<int>& perm) {
  return BipartiteOperator(permute_systems(x.matrix, x.dims, perm), permute_dims(x.dims, perm));
}

Matrix direct_sum(const std::vector<Matrix>& blocks) {
  Eigen::Index r = 0, c = 0;
  for (const Matrix& b : blocks) {
    r += b.rows();
    c += b.cols();
  }
  Matrix out = Matrix::Zero(r, c);
  r = c = 0;
  for (const Matrix& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

}  // namespace sqp
