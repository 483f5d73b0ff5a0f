#pragma once

#include <optional>
#include <string>

#include "schatten_qp/linalg.hpp"
#include "schatten_qp/optimizer.hpp"

namespace sqp {

// Unit-trace PSD operator on the given factors.
struct State {
  Matrix matrix;
  Dims dims;

  State() = default;
  State(Matrix m, Dims d);
};

enum class Method { NormBased, Direct };
std::string method_name(Method m);

struct EntropyResult {
  double value = 0.0;  // natural-log units
  std::optional<Matrix> witness;
  Method method = Method::NormBased;
  bool infinite = false;
};

struct Divergence {
  double value = 0.0;
  bool support_violation = false;  // value is +inf
};

// D_alpha(rho||sigma) = alpha/(alpha-1) log ||sigma^((1-alpha)/2alpha) rho sigma^((1-alpha)/2alpha)||_alpha.
Divergence sandwiched_divergence(const Matrix& rho, const Matrix& sigma, double alpha);

// Optimizer defaults for the direct routes: 16 restarts, finite-difference gradients.
OptimizerConfig direct_config(std::uint64_t seed = 0);

// H_alpha^up(A|B) through the (B:1, A:alpha) norm of rho_BA.
EntropyResult conditional_entropy_norm(const State& rho_ab, double alpha,
                                       const OptimizerConfig& cfg = {});
// sup over sigma_B of -D_alpha(rho_AB || 1 (x) sigma_B).
EntropyResult conditional_entropy_direct(const State& rho_ab, double alpha,
                                         const OptimizerConfig& cfg = direct_config());

// beta log ||sigma_BA^(1/beta)||_(beta, alpha), beta = alpha/(1-alpha), 0 < alpha < 1.
EntropyResult reversed_conditional(const State& sigma_ab, double alpha, Method method,
                                   const OptimizerConfig& cfg = {});

// inf over sigma_B of D_alpha(rho_A (x) sigma_B || rho_AB), 0 < alpha < 1.
EntropyResult umlaut(const State& rho_ab, double alpha, Method method,
                     const OptimizerConfig& cfg = {});

// F(gamma) = log ||rho_A^(1/2) rho_BA^gamma rho_A^(1/2)||_(1/gamma, 1/(1+gamma)).
double umlaut_log_norm(const State& rho_ab, double gamma, const OptimizerConfig& cfg = {});
// alpha -> 1 limit, -F'(0) by Richardson-extrapolated one-sided differences. Needs full rank.
double umlaut_limit(const State& rho_ab, const OptimizerConfig& cfg = {});

// (1/(1-p)) log Tr rho^p.
double renyi_entropy(const Matrix& rho, double p);

// Rejects alpha outside the allowed range or within 1e-3 of 1.
void require_alpha(double alpha, double lo, double hi, bool lo_inclusive);

}  // namespace sqp
