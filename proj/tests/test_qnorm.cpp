#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "schatten_qp/linalg.hpp"
#include "schatten_qp/qnorm.hpp"
#include "schatten_qp/random.hpp"

namespace sqp {
namespace {

using Pairs = std::vector<std::pair<double, double>>;

Matrix diag(const std::vector<double>& v) {
  Matrix m = Matrix::Zero(static_cast<int>(v.size()), static_cast<int>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = v[i];
  return m;
}

OptimizerConfig quick(std::uint64_t seed = 0) {
  OptimizerConfig c;
  c.restarts = 4;
  c.seed = seed;
  return c;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

TEST(IndexPair, Compatibility) {
  EXPECT_TRUE((IndexPair{0.5, 1}.compatible()));
  EXPECT_TRUE((IndexPair{1, 0.5}.compatible()));
  EXPECT_TRUE((IndexPair{2, kInf}.compatible()));
  EXPECT_FALSE((IndexPair{0.25, kInf}.compatible()));
  EXPECT_FALSE((IndexPair{2, 1.0 / 3}.compatible()));
  EXPECT_DOUBLE_EQ((IndexPair{0.5, 2}.kappa()), 0.5);
  EXPECT_DOUBLE_EQ((IndexPair{3, 2}.kappa()), 1.0);
  EXPECT_THROW((IndexPair{0.25, kInf}.require_compatible()), IncompatibleIndices);
  EXPECT_THROW((IndexPair{0, 1}.require_positive()), BadIndex);
  try {
    IndexPair{0.25, kInf}.require_compatible();
  } catch (const IncompatibleIndices& e) {
    EXPECT_NE(std::string(e.what()).find("|1/q - 1/p| <= 1"), std::string::npos);
  }
}

TEST(LqLpOracle, Examples) {
  EXPECT_NEAR(lqlp_oracle(identity(2), 1, 1), 2.0, 1e-14);
  Matrix v(2, 2);
  v << 3, 4, 0, 0;
  EXPECT_NEAR(lqlp_oracle(v, 2, 2), 5.0, 1e-14);
  v << 1, 1, 1, 1;
  EXPECT_NEAR(lqlp_oracle(v, 1, 2), 2.0 * std::sqrt(2.0), 1e-14);
  Rng rng(1);
  for (int k = 0; k < 5; ++k) {
    const Eigen::MatrixXd w = Eigen::MatrixXd::Random(2, 3);
    for (const auto& [q, p] : Pairs{{0.5, 1}, {2, 0.75}, {1.5, 3}})
      EXPECT_NEAR(lqlp_oracle(w.cast<Complex>(), q, p), oracle::lqlp(w, q, p), 1e-12);
  }
}

TEST(TwoIndexNorm, Examples) {
  const BipartiteOperator x(tensor(diag({1, 2}), identity(2)), {2, 2});
  EXPECT_NEAR(two_index_norm(x, {1, 2}).value, 3.0 * std::sqrt(2.0), 5e-3);

  const Matrix y = random_matrix(4, 4, 3);
  for (double p : {0.5, 1.0, 2.0, 3.0})
    EXPECT_NEAR(two_index_norm(BipartiteOperator(y, {2, 2}), {p, p}).value, schatten_norm(y, p), 1e-12);

  EXPECT_NEAR(two_index_norm(BipartiteOperator(max_entangled(2), {2, 2}), {0.5, 1}).value, 2.0, 5e-3);

  const Matrix d = diag({0.3, 0.1, 0.5, 0.1});
  Eigen::MatrixXd v(2, 2);
  v << 0.3, 0.1, 0.5, 0.1;
  EXPECT_NEAR(two_index_norm(BipartiteOperator(d, {2, 2}), {2.0 / 3, 1}).value,
              oracle::lqlp(v, 2.0 / 3, 1), 1e-5);
}

TEST(TwoIndexNorm, RejectsIncompatible) {
  const BipartiteOperator x(identity(4), {2, 2});
  EXPECT_THROW(two_index_norm(x, {0.25, kInf}), IncompatibleIndices);
  EXPECT_THROW(two_index_norm(BipartiteOperator(identity(8), {2, 2, 2}), {1, 1}), ShapeMismatch);
}

TEST(TwoIndexNorm, CommutativeOracle) {
  const Pairs pairs = {{0.5, 1}, {1, 0.5}, {2.0 / 3, 4.0 / 3}, {2, 1}, {1, 2}, {0.75, 0.75}};
  Rng rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int d2 : {2, 3}) {
    Eigen::MatrixXd v(2, d2);
    for (int i = 0; i < v.size(); ++i) v.data()[i] = u(rng);
    std::vector<double> flat;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < d2; ++j) flat.push_back(v(i, j));
    const BipartiteOperator x(diag(flat), {2, d2});
    for (const auto& [q, p] : pairs)
      EXPECT_LT(rel(two_index_norm(x, {q, p}, quick()).value, oracle::lqlp(v, q, p)), 5e-3)
          << "d2=" << d2 << " q=" << q << " p=" << p;
  }
}

TEST(TwoIndexNorm, Homogeneous) {
  const BipartiteOperator x(random_matrix(4, 4, 8), {2, 2});
  for (const auto& [q, p] : Pairs{{0.5, 1}, {2, 1}, {1, 2}}) {
    const double a = two_index_norm(x, {q, p}, quick()).value;
    const double b = two_index_norm(BipartiteOperator(-2.5 * x.matrix, {2, 2}), {q, p}, quick()).value;
    EXPECT_LT(rel(b, 2.5 * a), 1e-6);
  }
}

TEST(TwoIndexNorm, LocalIsometryInvariant) {
  Rng rng(12);
  const Matrix xm = gaussian_matrix(6, 6, rng);
  const BipartiteOperator x(xm, {2, 3});
  const Matrix u = tensor(random_unitary(2, rng), random_unitary(3, rng));
  const Matrix v = tensor(random_unitary(2, rng), random_unitary(3, rng));
  const BipartiteOperator y(u * xm * v, {2, 3});
  for (const auto& [q, p] : Pairs{{0.5, 1}, {1, 0.5}, {2.0 / 3, 4.0 / 3}, {2, 1}, {1, 2}}) {
    const double a = two_index_norm(x, {q, p}).value, b = two_index_norm(y, {q, p}).value;
    EXPECT_LE(std::abs(a - b), 5e-3 * a) << q << "," << p;
  }
}

TEST(TwoIndexNorm, BlockDiagonalFormula) {
  Rng rng(4);
  const std::vector<Matrix> blocks = {gaussian_matrix(2, 2, rng), gaussian_matrix(2, 2, rng)};
  const BipartiteOperator x(direct_sum(blocks), {2, 2});
  for (const auto& [q, p] : Pairs{{2, 1}, {1, 2}, {0.5, 1}, {1.5, 0.75}}) {
    const double formula = std::pow(std::pow(oracle::schatten(blocks[0], p), q) +
                                        std::pow(oracle::schatten(blocks[1], p), q),
                                    1.0 / q);
    EXPECT_LT(rel(two_index_norm(x, {q, p}).value, formula), 5e-3) << q << "," << p;
  }
}

TEST(TwoIndexNorm, TensorMultiplicative) {
  const Matrix a = random_matrix(2, 2, 1), b = random_matrix(3, 3, 2);
  const BipartiteOperator x(tensor(a, b), {2, 3});
  for (const auto& [q, p] : Pairs{{0.5, 1}, {2, 1}, {1, 2}, {0.75, 1.5}})
    EXPECT_LT(rel(two_index_norm(x, {q, p}).value, oracle::schatten(a, q) * oracle::schatten(b, p)), 5e-3);
}

TEST(TwoIndexNorm, PartialTraceOnPsd) {
  for (std::uint64_t s = 0; s < 3; ++s) {
    const BipartiteOperator x = random_bipartite_psd(2, 3, 6, s);
    const Matrix reduced = oracle::ptrace(x.matrix, 2, 3, 1);
    for (double q : {0.5, 0.75, 2.0})
      EXPECT_LT(rel(two_index_norm(x, {q, 1}).value, oracle::schatten(reduced, q)), 5e-3);
  }
}

// X = |0><0| (+) |1><1| with a = b^dagger = ((1,1),(0,0)) gives 2^(1/p - 1) at (q, p) = (2, 1/3).
TEST(TwoIndexNorm, BlockCounterexample) {
  const BipartiteOperator x(direct_sum({ket_bra(2, 0, 0), ket_bra(2, 1, 1)}), {2, 2});
  const double q = 2, p = 1.0 / 3, two_r = 2.0 / std::abs(1 / q - 1 / p);
  Matrix a(2, 2);
  a << 1, 1, 0, 0;
  const Matrix s = oracle::kron(a, Matrix::Identity(2, 2));
  const double at_ab = oracle::schatten(s * x.matrix * s.adjoint(), p) / std::pow(oracle::schatten(a, two_r), 2);
  EXPECT_NEAR(at_ab, std::pow(2.0, 1 / p - 1), 1e-12);
  const double computed = two_index_norm_unchecked(x, {q, p}, quick(), {{a * a.adjoint() / 2.0, a * a.adjoint() / 2.0}}).value;
  EXPECT_GE(computed, 4.0 - 1e-3);
  EXPECT_GE(computed - std::sqrt(2.0), 4.0 - std::sqrt(2.0) - 2e-3);
}

TEST(TwoIndexNorm, RestartValuesRespectDirection) {
  const BipartiteOperator x = random_bipartite_psd(2, 2, 4, 6);
  const NormResult sup = two_index_norm(x, {2, 1});
  for (double v : sup.restart_values) EXPECT_LE(v, sup.value + 1e-12);
  const NormResult inf = two_index_norm(x, {1, 2});
  for (double v : inf.restart_values) EXPECT_GE(v, inf.value - 1e-12);
}

TEST(TwoIndexNorm, FiniteDifferenceRouteAgrees) {
  const BipartiteOperator x = random_bipartite_psd(2, 2, 3, 9);
  OptimizerConfig fd = quick();
  fd.finite_difference = true;
  for (const auto& [q, p] : Pairs{{0.5, 1}, {2, 1}, {1, 2}})
    EXPECT_LT(rel(two_index_norm(x, {q, p}, quick()).value, two_index_norm(x, {q, p}, fd).value), 1e-5);
}

TEST(SandwichObjective, IdentityWeightsGiveSchatten) {
  const BipartiteOperator x(random_matrix(4, 4, 2), {2, 2});
  const Matrix flat = identity(2) / 2.0;
  const double v = sandwich_objective(x, {2, 1}, flat, flat);
  const double scale = std::pow(0.5, 0.5 * 0.5 * 2);  // (1/2)^(1/2r) on each side, 1/r = 1/2
  EXPECT_NEAR(v, scale * schatten_norm(x.matrix, 1), 1e-12);
}

TEST(SchattenVariational, Examples) {
  const auto [lhs, rhs] = schatten_variational_check(diag({1, 2}), 0.5, 1);
  EXPECT_NEAR(lhs, std::pow(1 + std::sqrt(2.0), 2), 1e-9);
  EXPECT_NEAR(rhs, std::pow(1 + std::sqrt(2.0), 2), 1e-6);
  for (const auto& [q, p] : Pairs{{0.5, 1}, {2, 1}, {1.5, 1.5}}) {
    const auto [l, r] = schatten_variational_check(identity(3), q, p);
    EXPECT_NEAR(l, std::pow(3.0, 1 / q), 1e-9);
    EXPECT_NEAR(r, std::pow(3.0, 1 / q), 1e-6);
  }
}

TEST(ThreeIndexNorm, ProductAndCollapse) {
  const Matrix rho = random_density(2, 1), sigma = random_density(2, 2), tau = random_density(2, 3);
  const BipartiteOperator x(tensor({rho, sigma, tau}), {2, 2, 2});
  const double p = 1, q = 0.5;
  const double expected = oracle::schatten(rho, p) * oracle::schatten(sigma, q) * oracle::schatten(tau, p);
  EXPECT_LT(rel(three_index_norm(x, p, q, quick()).value, expected), 2e-3);
  EXPECT_NEAR(three_index_norm(x, 0.75, 0.75, quick()).value, oracle::schatten(x.matrix, 0.75), 1e-9);

  const BipartiteOperator y = random_bipartite_psd(2, 2, 4, 4);
  const BipartiteOperator y3(y.matrix, {2, 2, 1});
  EXPECT_LT(rel(three_index_norm(y3, p, q, quick()).value, two_index_norm(y, {p, q}).value), 5e-3);
  EXPECT_THROW(three_index_norm(x, 0.5, 1, quick()), BadIndex);
}

TEST(ReverseHoelder, Examples) {
  const Matrix rho = random_density(4, 3);
  EXPECT_LT(rel(reverse_hoelder_value(BipartiteOperator(rho, {4, 1}), {0.5, 0.5}).value,
                oracle::schatten(rho, 0.5)),
            5e-3);
  const Matrix a = random_density(2, 5), b = random_density(2, 6);
  for (const auto& [q, p] : Pairs{{0.5, 0.75}, {0.75, 0.5}})
    EXPECT_LT(rel(reverse_hoelder_value(BipartiteOperator(tensor(a, b), {2, 2}), {q, p}).value,
                  oracle::schatten(a, q) * oracle::schatten(b, p)),
              2e-3);
  EXPECT_LT(rel(reverse_hoelder_value(BipartiteOperator(identity(4), {2, 2}), {0.5, 0.5}).value, 16.0), 5e-3);
}

TEST(ReverseHoelder, InfiniteDualIndexMatchesNorm) {
  const BipartiteOperator x = random_bipartite_psd(2, 2, 4, 13);
  for (const auto& [q, p] : Pairs{{0.5, 1}, {1, 0.5}})
    EXPECT_LT(rel(reverse_hoelder_value(x, {q, p}).value, two_index_norm(x, {q, p}).value), 1e-2);
}

TEST(RelationalFactor, Examples) {
  const BipartiteOperator x = random_bipartite_psd(2, 2, 4, 21);
  EXPECT_LT(rel(relational_factor_value(x, {0.5, 1, 1}, quick()).value, two_index_norm(x, {0.5, 1}).value), 5e-3);
  EXPECT_LT(rel(relational_factor_value(x, {0.75, 0.75, 1}, quick()).value,
                two_index_norm(x, {0.75, 1}).value),
            5e-3);
  EXPECT_LT(rel(relational_factor_value(x, {0.5, 1, 0.75}).value, two_index_norm(x, {0.5, 0.75}).value), 5e-3);
}

TEST(Amgm, ScalarRewrites) {
  Rng rng(2);
  std::uniform_real_distribution<double> pos(0.1, 5.0), w(0.05, 0.95);
  for (int k = 0; k < 20; ++k) {
    const double a = w(rng), x = pos(rng), y = pos(rng), z = pos(rng);
    EXPECT_GE(amgm::weighted_mean(a, x, y, z), amgm::weighted_geometric(a, x, y, z) - 1e-12);
  }
  EXPECT_NEAR(amgm::r0(1, 1), 1.0 / 3, 1e-15);
  EXPECT_NEAR(amgm::sum_form(1, 1, 1, 1, 1), 1.0, 1e-15);
  EXPECT_NEAR(amgm::product_form(1, 1, 1, 1, 1), 1.0, 1e-15);
  // With r2 > 0 the infimum of the sum form over the homogeneous rescaling equals the product form.
  const double r1 = 2, r2 = 0.5, g = 0.7, h = 2.3, f = 1.1;
  double best = 1e300;
  for (double s = -4; s <= 4; s += 0.01)
    for (double t = -4; t <= 4; t += 0.01)
      best = std::min(best, amgm::sum_form(g * std::exp(r1 * s), h * std::exp(r1 * t),
                                           f * std::exp(-r2 * (s + t)), r1, r2));
  EXPECT_NEAR(best, amgm::product_form(g, h, f, r1, r2), 1e-3);
  EXPECT_NEAR(amgm::product_form(g * std::exp(r1 * 0.3), h * std::exp(r1 * -0.2), f * std::exp(-r2 * 0.1), r1, r2),
              amgm::product_form(g, h, f, r1, r2), 1e-12);
}

}  // namespace
}  // namespace sqp
