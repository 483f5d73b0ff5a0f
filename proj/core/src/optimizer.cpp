#include "schatten_qp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "schatten_qp/parallel.hpp"
#include "schatten_qp/random.hpp"

namespace sqp {

void OptimizerConfig::validate() const {
  if (max_iters < 1) throw BadIndex("max_iters must be positive");
  if (!(step_init > 0.0)) throw BadIndex("step_init must be positive");
  if (!(grad_fd_step > 0.0)) throw BadIndex("grad_fd_step must be positive");
  if (!(tol_obj > 0.0)) throw BadIndex("tol_obj must be positive");
  if (restarts < 0) throw BadIndex("restarts must be non-negative");
  if (!(floor >= 0.0) || floor >= 0.1) throw BadIndex("floor must lie in [0, 0.1)");
}

Matrix project_spectraplex(const Matrix& h, double floor) {
  const int k = static_cast<int>(h.rows());
  if (k == 1) return Matrix::Ones(1, 1);
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h));
  RealVector nu = es.eigenvalues().array() - floor;
  const double total = 1.0 - k * floor;
  // Euclidean projection of nu onto {nu >= 0, sum = total}.
  std::vector<double> sorted(nu.data(), nu.data() + k);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (int j = 0; j < k; ++j) {
    cum += sorted[j];
    const double t = (cum - total) / (j + 1);
    if (sorted[j] - t > 0.0) theta = t;
  }
  RealVector lam(k);
  for (int i = 0; i < k; ++i) lam(i) = std::max(nu(i) - theta, 0.0) + floor;
  lam /= lam.sum();
  const Matrix& v = es.eigenvectors();
  return v * lam.asDiagonal() * v.adjoint();
}

Point project_spectraplex(const Point& x, double floor) {
  Point out;
  out.reserve(x.size());
  for (const Matrix& b : x) out.push_back(project_spectraplex(b, floor));
  return out;
}

double inner(const Point& a, const Point& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += (a[i].adjoint() * b[i]).trace().real();
  return acc;
}

namespace {

Point axpy(const Point& x, double t, const Point& d) {
  Point out = x;
  for (size_t i = 0; i < x.size(); ++i) out[i] += t * d[i];
  return out;
}

Point diff(const Point& a, const Point& b) {
  Point out = a;
  for (size_t i = 0; i < a.size(); ++i) out[i] -= b[i];
  return out;
}

double max_abs(const Point& a) {
  double m = 0.0;
  for (const Matrix& b : a)
    if (b.size()) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

// True when some block has an eigenvalue within a few multiples of the floor.
bool on_boundary(const Point& x, double floor) {
  for (const Matrix& b : x) {
    if (b.rows() < 2) continue;
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(b), Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) <= 10.0 * floor + 1e-14) return true;
  }
  return false;
}

// Pulls every block towards its centre by the fraction t.
Point towards_centre(const Point& x, double t) {
  Point out = x;
  for (Matrix& b : out) b = (1.0 - t) * b + (t / static_cast<double>(b.rows())) * identity(b.rows());
  return out;
}

}  // namespace

Point fd_gradient(const Objective& f, const Point& x, double step) {
  Point g;
  for (const Matrix& b : x) g.push_back(Matrix::Zero(b.rows(), b.cols()));
  auto probe = [&](size_t blk, const Matrix& dir, double norm2) {
    Point xp = x, xm = x;
    xp[blk] += step * dir;
    xm[blk] -= step * dir;
    const double c = (f(xp, nullptr) - f(xm, nullptr)) / (2.0 * step);
    g[blk] += (c / norm2) * dir;
  };
  const double base_step = step;
  for (size_t blk = 0; blk < x.size(); ++blk) {
    const int k = static_cast<int>(x[blk].rows());
    // Keep the probes inside the PSD cone.
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(x[blk]), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    step = lmin > 0.0 ? std::min(base_step, 0.25 * lmin) : base_step;
    for (int i = 0; i < k; ++i) probe(blk, ket_bra(k, i, i), 1.0);
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        Matrix re = ket_bra(k, i, j) + ket_bra(k, j, i);
        Matrix im = Complex(0.0, 1.0) * (ket_bra(k, i, j) - ket_bra(k, j, i));
        probe(blk, re, 2.0);
        probe(blk, im, 2.0);
      }
  }
  return g;
}

SpgResult spg_minimize(const Objective& f, Point x0, const OptimizerConfig& cfg) {
  constexpr int kHistory = 10;
  constexpr double kArmijo = 1e-4;
  constexpr double kAlphaMin = 1e-14, kAlphaMax = 1e12;
  constexpr int kStagnation = 50;  // iterations without a meaningful gain on the best value

  auto eval = [&](const Point& x, Point* g) {
    if (!cfg.finite_difference) return f(x, g);
    const double v = f(x, nullptr);
    if (g && std::isfinite(v)) *g = fd_gradient(f, x, cfg.grad_fd_step);
    return v;
  };

  SpgResult res;
  Point x = project_spectraplex(x0, cfg.floor);
  Point g;
  double fx = eval(x, &g);
  res.x = x;
  res.f = fx;
  if (!std::isfinite(fx)) return res;

  auto initial_step = [&] {
    const Point d = diff(project_spectraplex(diff(x, g), cfg.floor), x);
    const double m = max_abs(d);
    return m > 0.0 ? std::clamp(cfg.step_init / m, kAlphaMin, kAlphaMax) : cfg.step_init;
  };
  double alpha = initial_step();
  std::deque<double> history{fx};
  int streak = 0;
  int last_gain = 0;
  int probes_left = 4;

  // A stop on the boundary can be spurious: objectives built from positive powers of x have
  // unbounded slope there, which support truncation hides. Resume from a slightly interior point
  // when it is better.
  auto resume_inside = [&]() {
    if (probes_left == 0 || !on_boundary(x, cfg.floor)) return false;
    --probes_left;
    for (double t : {1e-6, 1e-4, 1e-2}) {
      const Point xi = towards_centre(x, t);
      Point gi;
      const double fi = eval(xi, &gi);
      if (std::isfinite(fi) && fi < fx - cfg.tol_obj * std::max(1.0, std::abs(fx))) {
        x = xi;
        g = std::move(gi);
        fx = fi;
        if (fx < res.f) {
          res.f = fx;
          res.x = x;
        }
        alpha = initial_step();
        history.assign(1, fx);
        streak = 0;
        return true;
      }
    }
    return false;
  };

  for (int it = 1; it <= cfg.max_iters; ++it) {
    res.iterations = it;
    // The trace part of g only shifts the projection threshold; dropping it avoids cancellation
    // when alpha is large.
    Point trial = x;
    for (size_t i = 0; i < x.size(); ++i) {
      const auto k = static_cast<double>(g[i].rows());
      trial[i] -= alpha * (g[i] - (g[i].trace() / k) * identity(g[i].rows()));
    }
    const Point d = diff(project_spectraplex(trial, cfg.floor), x);
    const double gd = inner(g, d);
    if (max_abs(d) <= 1e-15 || gd >= 0.0) {
      if (resume_inside()) continue;
      res.converged = true;
      break;
    }
    const double fmax = *std::max_element(history.begin(), history.end());
    double lambda = 1.0;
    Point xn, gn;
    double fn = 0.0;
    bool accepted = false;
    while (lambda > 1e-16) {
      xn = axpy(x, lambda, d);
      fn = eval(xn, &gn);
      if (std::isfinite(fn) && fn <= fmax + kArmijo * lambda * gd) {
        accepted = true;
        break;
      }
      double next = 0.1 * lambda;
      if (std::isfinite(fn)) {
        const double denom = 2.0 * (fn - fx - lambda * gd);
        if (denom > 0.0) next = -gd * lambda * lambda / denom;
      }
      lambda = std::clamp(next, 0.1 * lambda, 0.5 * lambda);
    }
    if (!accepted) {
      if (resume_inside()) continue;
      // No decrease available at machine precision: treat as stationary.
      res.converged = true;
      break;
    }
    const Point s = diff(xn, x);
    const Point y = diff(gn, g);
    const double sty = inner(s, y);
    const double sts = inner(s, s);
    alpha = sty > 0.0 ? std::clamp(sts / sty, kAlphaMin, kAlphaMax) : kAlphaMax;

    const double change = std::abs(fx - fn);
    streak = change <= cfg.tol_obj * std::max(1.0, std::abs(fn)) ? streak + 1 : 0;
    x = std::move(xn);
    g = std::move(gn);
    fx = fn;
    if (fx < res.f - cfg.tol_obj * std::max(1.0, std::abs(res.f))) last_gain = it;
    if (fx < res.f) {
      res.f = fx;
      res.x = x;
    }
    if (it - last_gain >= kStagnation) {
      res.converged = true;
      break;
    }
    history.push_back(fx);
    if (static_cast<int>(history.size()) > kHistory) history.pop_front();
    if (streak >= 3) {
      if (resume_inside()) continue;
      res.converged = true;
      break;
    }
  }
  return res;
}

MultiStartResult multi_start_minimize(const Objective& f, const std::vector<Point>& starts,
                                      const OptimizerConfig& cfg, bool parallel) {
  return multi_start_minimize([&f] { return f; }, starts, cfg, parallel);
}

MultiStartResult multi_start_minimize(const std::function<Objective()>& factory,
                                      const std::vector<Point>& starts, const OptimizerConfig& cfg,
                                      bool parallel) {
  const int n = static_cast<int>(starts.size());
  std::vector<SpgResult> runs(n);
  auto body = [&](int i) { runs[i] = spg_minimize(factory(), starts[i], cfg); };
  if (parallel) {
    parallel_for(n, body);
  } else {
    for (int i = 0; i < n; ++i) body(i);
  }
  MultiStartResult out;
  for (int i = 0; i < n; ++i) {
    out.start_values.push_back(runs[i].f);
    out.total_iterations += runs[i].iterations;
    if (i == 0 || runs[i].f < out.best.f) {
      out.best = runs[i];
      out.best_start = i;
    }
  }
  return out;
}

std::vector<Point> default_starts(const std::vector<int>& block_dims, const OptimizerConfig& cfg,
                                  std::uint64_t stream) {
  std::vector<Point> starts;
  Point flat;
  for (int k : block_dims) flat.push_back(identity(k) / static_cast<double>(k));
  starts.push_back(flat);
  Rng rng(derive_seed(cfg.seed, "starts", stream));
  for (int r = 0; r < cfg.restarts; ++r) {
    Point p;
    for (int k : block_dims) p.push_back(random_density(k, rng));
    starts.push_back(std::move(p));
  }
  return starts;
}

}  // namespace sqp
