#include "schatten_qp/random.hpp"

#include <cmath>

namespace sqp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t counter) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a over the tag
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return splitmix64(splitmix64(base ^ h) + counter);
}

Matrix gaussian_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const double re = n(rng);
      const double im = n(rng);
      g(i, j) = Complex(re, im);
    }
  return g;
}

Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  return gaussian_matrix(rows, cols, rng);
}

Matrix random_unitary(int d, Rng& rng) {
  const Matrix g = gaussian_matrix(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix column phases so the distribution is Haar.
  for (int k = 0; k < d; ++k) {
    const Complex diag = r(k, k);
    const double mag = std::abs(diag);
    if (mag > 0.0) q.col(k) *= diag / mag;
  }
  return q;
}

Matrix random_unitary(int d, std::uint64_t seed) {
  Rng rng(seed);
  return random_unitary(d, rng);
}

Matrix random_density(int d, Rng& rng, int rank) {
  if (rank <= 0 || rank > d) rank = d;
  const Matrix g = gaussian_matrix(d, rank, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitian_part(rho);
}

Matrix random_density(int d, std::uint64_t seed) {
  Rng rng(seed);
  return random_density(d, rng);
}

BipartiteOperator random_bipartite_psd(int d1, int d2, int rank, Rng& rng) {
  return BipartiteOperator(random_density(d1 * d2, rng, rank), {d1, d2});
}

BipartiteOperator random_bipartite_psd(int d1, int d2, int rank, std::uint64_t seed) {
  Rng rng(seed);
  return random_bipartite_psd(d1, d2, rank, rng);
}

Matrix random_pure(int d, Rng& rng) { return random_density(d, rng, 1); }

}  // namespace sqp
