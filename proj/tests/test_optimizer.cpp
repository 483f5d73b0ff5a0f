#include <gtest/gtest.h>

#include "schatten_qp/linalg.hpp"
#include "schatten_qp/optimizer.hpp"
#include "schatten_qp/random.hpp"

namespace sqp {
namespace {

Matrix hermitian(int d, std::uint64_t seed) { return hermitian_part(random_matrix(d, d, seed)); }

TEST(Projection, LandsOnSpectraplex) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Matrix p = project_spectraplex(hermitian(3, s), 1e-9);
    EXPECT_NEAR(p.trace().real(), 1.0, 1e-12);
    EXPECT_GE(herm_eig(p).eigenvalues.minCoeff(), 1e-9 - 1e-12);
    EXPECT_LT((project_spectraplex(p, 1e-9) - p).norm(), 1e-12);
  }
  const Matrix rho = random_density(3, 4);
  EXPECT_LT((project_spectraplex(rho, 0.0) - rho).norm(), 1e-12);
}

TEST(Gradient, FiniteDifferenceMatchesAnalytic) {
  const Matrix a = hermitian(3, 1), b = hermitian(2, 2);
  const Objective f = [&](const Point& x, Point* g) {
    const double v = (a * x[0]).trace().real() + (x[0] * x[0]).trace().real() +
                     std::log((b * x[1]).trace().real() + 5.0);
    if (g) {
      const double denom = (b * x[1]).trace().real() + 5.0;
      *g = {a + 2.0 * x[0], b / denom};
    }
    return v;
  };
  const Point x = {random_density(3, 7), random_density(2, 8)};
  Point ga;
  f(x, &ga);
  const Point gf = fd_gradient(f, x, 1e-5);
  for (size_t k = 0; k < x.size(); ++k) EXPECT_LT((ga[k] - gf[k]).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_NEAR(inner(ga, ga), ga[0].squaredNorm() + ga[1].squaredNorm(), 1e-10);
}

TEST(Spg, LinearObjectiveFindsSmallestEigenvalue) {
  const Matrix a = hermitian(4, 3);
  const Objective f = [&](const Point& x, Point* g) {
    if (g) *g = {a};
    return (a * x[0]).trace().real();
  };
  OptimizerConfig cfg;
  cfg.floor = 0.0;
  cfg.restarts = 3;
  const MultiStartResult r = multi_start_minimize(f, default_starts({4}, cfg, 0), cfg);
  EXPECT_NEAR(r.best.f, herm_eig(a).eigenvalues(0), 1e-7);
  EXPECT_EQ(r.start_values.size(), 4u);
  for (double v : r.start_values) EXPECT_GE(v, r.best.f);
}

TEST(Spg, FiniteDifferenceModeAgrees) {
  const Matrix a = hermitian(3, 5);
  const Objective f = [&](const Point& x, Point* g) {
    if (g) *g = {a + 2.0 * x[0]};
    return (a * x[0]).trace().real() + (x[0] * x[0]).trace().real();
  };
  OptimizerConfig analytic;
  OptimizerConfig fd = analytic;
  fd.finite_difference = true;
  const Point x0 = {identity(3) / 3.0};
  EXPECT_NEAR(spg_minimize(f, x0, analytic).f, spg_minimize(f, x0, fd).f, 1e-8);
}

TEST(Spg, DeterministicAcrossRuns) {
  const Matrix a = hermitian(3, 9);
  const Objective f = [&](const Point& x, Point* g) {
    if (g) *g = {a + x[0]};
    return (a * x[0]).trace().real() + 0.5 * (x[0] * x[0]).trace().real();
  };
  OptimizerConfig cfg;
  cfg.seed = 42;
  const auto r1 = multi_start_minimize(f, default_starts({3}, cfg, 1), cfg);
  const auto r2 = multi_start_minimize(f, default_starts({3}, cfg, 1), cfg);
  EXPECT_EQ(r1.best.f, r2.best.f);
  EXPECT_EQ(r1.start_values, r2.start_values);
}

TEST(Config, Validation) {
  OptimizerConfig cfg;
  cfg.max_iters = 0;
  EXPECT_THROW(cfg.validate(), std::runtime_error);
  cfg = {};
  cfg.restarts = -1;
  EXPECT_THROW(cfg.validate(), std::runtime_error);
}

}  // namespace
}  // namespace sqp
