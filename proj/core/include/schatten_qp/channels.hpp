#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "schatten_qp/linalg.hpp"
#include "schatten_qp/optimizer.hpp"

namespace sqp {

// Completely positive map X -> sum_i K_i X K_i^dagger.
struct CPMap {
  std::vector<Matrix> kraus;  // each d_out x d_in
  int d_in = 0;
  int d_out = 0;
  bool tp = false;  // sum_i K_i^dagger K_i = 1 within 1e-9

  CPMap() = default;
  CPMap(std::vector<Matrix> kraus, int d_in, int d_out);
};

struct ChannelNormResult {
  double value = 0.0;
  Matrix witness_input;  // trace-one PSD input on (E, Q)
  int env_dim = 1;       // reference dimension attaining value
  std::vector<double> sweep_values;  // one entry per d_E = 1..e_max
  int iterations = 0;
  bool converged = true;
};

Matrix apply_channel(const CPMap& phi, const Matrix& x);
Matrix apply_adjoint(const CPMap& phi, const Matrix& y);
CPMap id_tensor(const CPMap& phi, int d_e);  // id_E (x) phi
CPMap tensor_maps(const CPMap& phi, const CPMap& psi);

CPMap identity_channel(int d);
CPMap unitary_channel(const Matrix& u);
CPMap replacer_channel(int d);                 // rho -> Tr[rho] 1/d
CPMap depolarizing(int d, double lambda);      // (1-lambda) rho + lambda Tr[rho] 1/d
CPMap dephasing(int d);                        // keeps the diagonal
CPMap random_channel(int d_in, int d_out, int n_kraus, std::uint64_t seed);

// Optimizer defaults for channel problems: 16 restarts, 300 iterations, input floor 1e-9.
OptimizerConfig channel_config(std::uint64_t seed = 0);

// sup (norm) / inf (conorm) over PSD X of ||phi(X)||_p / ||X||_q.
ChannelNormResult mixed_norm_pos(const CPMap& phi, double q, double p,
                                 const OptimizerConfig& cfg = channel_config());
ChannelNormResult mixed_conorm_pos(const CPMap& phi, double q, double p,
                                   const OptimizerConfig& cfg = channel_config());

// Sweep d_E = 1..e_max of ||(id_E (x) phi)(X)||_(1,p) / ||X||_(1,q) over PSD X; e_max <= 0 means d_in.
ChannelNormResult cb_norm_estimate(const CPMap& phi, double q, double p, int e_max = 0,
                                   const OptimizerConfig& cfg = channel_config());
ChannelNormResult cb_conorm_estimate(const CPMap& phi, double q, double p, int e_max = 0,
                                     const OptimizerConfig& cfg = channel_config());

// sup over PSD X on (Q, T) of ||(phi (x) id_T)(X)||_(p,1) / ||X||_(q,1).
ChannelNormResult adjoined_norm_pos(const CPMap& phi, int d_t, double q, double p,
                                    const OptimizerConfig& cfg = channel_config());

// sup over inputs of H_p of the output, through the 1 -> p norm (p < 1) or conorm (p > 1).
double max_output_entropy(const CPMap& phi, double p, const OptimizerConfig& cfg = channel_config());
// p/(1-p) log of the cb 1 -> p conorm, 1/2 <= p < 1.
double cb_min_output_entropy(const CPMap& phi, double p, int e_max = 0,
                             const OptimizerConfig& cfg = channel_config());

nlohmann::json channel_to_json(const CPMap& phi);
CPMap channel_from_json(const nlohmann::json& j);  // ParseError, ShapeMismatch

}  // namespace sqp
