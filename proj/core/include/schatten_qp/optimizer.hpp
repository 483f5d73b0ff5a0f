#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "schatten_qp/linalg.hpp"

namespace sqp {

struct OptimizerConfig {
  int max_iters = 1500;
  double step_init = 1.0;
  double grad_fd_step = 1e-5;
  double tol_obj = 1e-11;  // stop once the objective moves less than this (relative) for a few steps
  int restarts = 8;        // random starts in addition to the flat start
  std::uint64_t seed = 0;
  bool finite_difference = false;  // use central differences instead of the analytic gradient
  double floor = 1e-12;            // smallest eigenvalue kept by the projection

  void validate() const;
};

// A point is a list of Hermitian blocks; each block lives on {Tr = 1, eigenvalues >= floor}.
using Point = std::vector<Matrix>;

// Objective to minimize. Writes the gradient (Hermitian blocks, Re Tr pairing) when asked.
// Returning +inf marks a point outside the domain.
using Objective = std::function<double(const Point& x, Point* grad)>;

struct SpgResult {
  Point x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

Matrix project_spectraplex(const Matrix& h, double floor);
Point project_spectraplex(const Point& x, double floor);

// Central differences in an orthogonal Hermitian basis of every block.
Point fd_gradient(const Objective& f, const Point& x, double step);

double inner(const Point& a, const Point& b);

// Spectral projected gradient with Barzilai-Borwein steps and a nonmonotone Armijo search.
SpgResult spg_minimize(const Objective& f, Point x0, const OptimizerConfig& cfg);

struct MultiStartResult {
  SpgResult best;
  int best_start = 0;
  std::vector<double> start_values;  // objective per start, start order
  int total_iterations = 0;
};

// Runs spg_minimize from each start and keeps the lowest objective (earliest start on ties).
MultiStartResult multi_start_minimize(const Objective& f, const std::vector<Point>& starts,
                                      const OptimizerConfig& cfg, bool parallel = true);

// Same, but each start gets its own objective from the factory (for stateful warm starts).
MultiStartResult multi_start_minimize(const std::function<Objective()>& factory,
                                      const std::vector<Point>& starts, const OptimizerConfig& cfg,
                                      bool parallel = true);

// Flat start plus cfg.restarts random trace-one starts for the given block sizes.
std::vector<Point> default_starts(const std::vector<int>& block_dims, const OptimizerConfig& cfg,
                                  std::uint64_t stream);

}  // namespace sqp
