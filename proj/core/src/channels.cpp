#include "schatten_qp/channels.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include "kernel.hpp"
#include "schatten_qp/entropy.hpp"
#include "schatten_qp/io.hpp"
#include "schatten_qp/qnorm.hpp"
#include "schatten_qp/random.hpp"

namespace sqp {

CPMap::CPMap(std::vector<Matrix> k, int din, int dout) : kraus(std::move(k)), d_in(din), d_out(dout) {
  if (d_in < 1 || d_out < 1) throw ShapeMismatch("channel dimensions must be positive");
  if (kraus.empty()) throw ShapeMismatch("channel needs at least one Kraus operator");
  Matrix sum = Matrix::Zero(d_in, d_in);
  for (const Matrix& k : kraus) {
    if (k.rows() != d_out || k.cols() != d_in) {
      std::ostringstream msg;
      msg << "Kraus operator is " << k.rows() << "x" << k.cols() << ", expected " << d_out << "x"
          << d_in;
      throw ShapeMismatch(msg.str());
    }
    require_finite(k, "Kraus operator");
    sum += k.adjoint() * k;
  }
  tp = (sum - identity(d_in)).cwiseAbs().maxCoeff() <= 1e-9;
}

Matrix apply_channel(const CPMap& phi, const Matrix& x) {
  if (x.rows() != phi.d_in || x.cols() != phi.d_in) throw ShapeMismatch("channel input has wrong size");
  Matrix out = Matrix::Zero(phi.d_out, phi.d_out);
  for (const Matrix& k : phi.kraus) out += k * x * k.adjoint();
  return out;
}

Matrix apply_adjoint(const CPMap& phi, const Matrix& y) {
  if (y.rows() != phi.d_out || y.cols() != phi.d_out)
    throw ShapeMismatch("adjoint channel input has wrong size");
  Matrix out = Matrix::Zero(phi.d_in, phi.d_in);
  for (const Matrix& k : phi.kraus) out += k.adjoint() * y * k;
  return out;
}

CPMap id_tensor(const CPMap& phi, int d_e) {
  if (d_e < 1) throw ShapeMismatch("reference dimension must be positive");
  std::vector<Matrix> ks;
  for (const Matrix& k : phi.kraus) ks.push_back(tensor(identity(d_e), k));
  return CPMap(std::move(ks), d_e * phi.d_in, d_e * phi.d_out);
}

CPMap tensor_maps(const CPMap& phi, const CPMap& psi) {
  std::vector<Matrix> ks;
  for (const Matrix& a : phi.kraus)
    for (const Matrix& b : psi.kraus) ks.push_back(tensor(a, b));
  return CPMap(std::move(ks), phi.d_in * psi.d_in, phi.d_out * psi.d_out);
}

CPMap identity_channel(int d) { return CPMap({identity(d)}, d, d); }

CPMap unitary_channel(const Matrix& u) {
  require_square(u, "unitary");
  const int d = static_cast<int>(u.rows());
  return CPMap({u}, d, d);
}

CPMap replacer_channel(int d) {
  if (d < 1) throw ShapeMismatch("replacer dimension must be positive");
  std::vector<Matrix> ks;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) ks.push_back(ket_bra(d, i, j) / std::sqrt(static_cast<double>(d)));
  return CPMap(std::move(ks), d, d);
}

CPMap depolarizing(int d, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw BadIndex("depolarizing parameter must lie in [0, 1]");
  std::vector<Matrix> ks;
  if (lambda < 1.0) ks.push_back(std::sqrt(1.0 - lambda) * identity(d));
  if (lambda > 0.0)
    for (const Matrix& k : replacer_channel(d).kraus) ks.push_back(std::sqrt(lambda) * k);
  return CPMap(std::move(ks), d, d);
}

CPMap dephasing(int d) {
  std::vector<Matrix> ks;
  for (int i = 0; i < d; ++i) ks.push_back(ket_bra(d, i, i));
  return CPMap(std::move(ks), d, d);
}

CPMap random_channel(int d_in, int d_out, int n_kraus, std::uint64_t seed) {
  if (d_in < 1 || d_out < 1 || n_kraus < 1) throw ShapeMismatch("channel dimensions must be positive");
  // Isometry V: d_in -> n_kraus * d_out taken from the leading columns of a Haar unitary.
  const int big = n_kraus * d_out;
  if (big < d_in) throw ShapeMismatch("n_kraus * d_out must be at least d_in for a channel");
  const Matrix u = random_unitary(big, seed);
  const Matrix v = u.leftCols(d_in);
  std::vector<Matrix> ks;
  for (int k = 0; k < n_kraus; ++k) ks.push_back(v.middleRows(k * d_out, d_out));
  return CPMap(std::move(ks), d_in, d_out);
}

OptimizerConfig channel_config(std::uint64_t seed) {
  OptimizerConfig c;
  c.restarts = 16;
  c.seed = seed;
  c.floor = 1e-9;
  c.max_iters = 300;
  c.tol_obj = 1e-10;
  return c;
}

namespace {

using detail::LogNorm;
using detail::WarmStart;

// Ratio ||(phi (x) ref)(X)||_out / ||X||_in with the reference factor at index t.
struct RatioSpec {
  int d_ref = 1;
  bool ref_first = true;  // reference factor E before the channel factor
  double t = 1.0;
  double q = 1.0;
  double p = 1.0;
  bool maximize = true;
};

// log of the two-indexed norm with the reference factor placed per spec.
LogNorm ratio_term(const Matrix& x, const RatioSpec& rs, int d_sys, double index,
                   const OptimizerConfig& icfg, WarmStart* warm, bool grad) {
  if (rs.ref_first) return detail::log_norm(x, rs.d_ref, d_sys, rs.t, index, true, icfg, warm, grad);
  return detail::log_norm(x, d_sys, rs.d_ref, index, rs.t, true, icfg, warm, grad);
}

// Pure input sum_{i<k} |i>_E |i>_Q / sqrt(k) on (E, Q), k = min(d_e, d_in).
Matrix entangled_input(int d_e, int d_in, bool ref_first) {
  const int k = std::min(d_e, d_in);
  const int n = d_e * d_in;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n);
  for (int i = 0; i < k; ++i) psi(ref_first ? i * d_in + i : i * d_e + i) = 1.0 / std::sqrt(k);
  return psi * psi.adjoint();
}

struct RatioOptimum {
  double log_value = 0.0;
  Matrix witness;
  int iterations = 0;
  bool converged = true;
};

RatioOptimum optimize_ratio(const CPMap& phi, const RatioSpec& rs, const OptimizerConfig& cfg,
                            const std::vector<Matrix>& extra_starts, std::uint64_t stream) {
  const CPMap full = rs.ref_first ? id_tensor(phi, rs.d_ref) : [&] {
    std::vector<Matrix> ks;
    for (const Matrix& k : phi.kraus) ks.push_back(tensor(k, identity(rs.d_ref)));
    return CPMap(std::move(ks), phi.d_in * rs.d_ref, phi.d_out * rs.d_ref);
  }();
  const double sign = rs.maximize ? -1.0 : 1.0;
  const OptimizerConfig icfg = detail::inner_config(cfg);

  // Log ratio at X, with the gradient in X when requested.
  auto evaluate = [&](const Matrix& x, WarmStart* w_out, WarmStart* w_in, Matrix* grad) {
    const Matrix y = apply_channel(full, x);
    const LogNorm num = ratio_term(y, rs, phi.d_out, rs.p, icfg, w_out, grad != nullptr);
    const LogNorm den = ratio_term(x, rs, phi.d_in, rs.q, icfg, w_in, grad != nullptr);
    if (!std::isfinite(num.log_value) || !std::isfinite(den.log_value)) return kInf;
    if (grad) *grad = hermitian_part(apply_adjoint(full, num.grad) - den.grad);
    return num.log_value - den.log_value;
  };

  auto factory = [&]() -> Objective {
    auto w_out = std::make_shared<WarmStart>();
    auto w_in = std::make_shared<WarmStart>();
    return [&, w_out, w_in](const Point& pt, Point* g) {
      Matrix gx;
      const double v = evaluate(pt[0], w_out.get(), w_in.get(), g ? &gx : nullptr);
      if (!std::isfinite(v)) return kInf;
      if (g) {
        g->clear();
        g->push_back(sign * gx);
      }
      return sign * v;
    };
  };

  const int n = full.d_in;
  std::vector<Point> starts = default_starts({n}, cfg, stream);
  Matrix basis0 = Matrix::Zero(n, n);
  basis0(0, 0) = 1.0;
  starts.push_back({basis0});
  if (rs.d_ref > 1) starts.push_back({entangled_input(rs.d_ref, phi.d_in, rs.ref_first)});
  for (const Matrix& m : extra_starts) starts.push_back({m});
  const MultiStartResult r = multi_start_minimize(factory, starts, cfg, true);

  RatioOptimum out;
  out.log_value = sign * r.best.f;
  out.witness = r.best.x[0];
  out.iterations = r.best.iterations;
  out.converged = r.best.converged;

  // The floor keeps every eigenvalue positive; dropping the tiny ones often improves the value.
  const HermitianEigen eig = herm_eig(out.witness);
  const double top = eig.eigenvalues.maxCoeff();
  RealVector lam = eig.eigenvalues;
  for (int i = 0; i < lam.size(); ++i)
    if (lam(i) < 1e-6 * top) lam(i) = 0.0;
  lam /= lam.sum();
  const Matrix trimmed = eig.eigenvectors * lam.asDiagonal() * eig.eigenvectors.adjoint();
  const double tv = evaluate(trimmed, nullptr, nullptr, nullptr);
  if (std::isfinite(tv) && sign * tv < sign * out.log_value) {
    out.log_value = tv;
    out.witness = trimmed;
  }
  return out;
}

void require_channel_indices(double q, double p) {
  IndexPair{q, p}.require_positive();
}

// Embeds X on (E, Q) into (E', Q) with E' = E + 1 by padding E with a zero level.
Matrix pad_reference(const Matrix& x, int d_e, int d_in) {
  const int n = (d_e + 1) * d_in;
  Matrix out = Matrix::Zero(n, n);
  out.topLeftCorner(d_e * d_in, d_e * d_in) = x;
  return out;
}

ChannelNormResult single(const CPMap& phi, double q, double p, bool maximize,
                         const OptimizerConfig& cfg) {
  require_channel_indices(q, p);
  cfg.validate();
  RatioSpec rs;
  rs.q = q;
  rs.p = p;
  rs.maximize = maximize;
  const RatioOptimum o = optimize_ratio(phi, rs, cfg, {}, 20);
  ChannelNormResult r;
  r.value = std::exp(o.log_value);
  r.witness_input = o.witness;
  r.sweep_values = {r.value};
  r.iterations = o.iterations;
  r.converged = o.converged;
  return r;
}

ChannelNormResult cb_sweep(const CPMap& phi, double q, double p, int e_max, bool maximize,
                           const OptimizerConfig& cfg) {
  if (q < 0.5 || p < 0.5) throw BadIndex("cb estimates need q, p >= 1/2");
  require_channel_indices(q, p);
  IndexPair{1.0, q}.require_compatible();
  IndexPair{1.0, p}.require_compatible();
  cfg.validate();
  if (e_max <= 0) e_max = phi.d_in;
  ChannelNormResult r;
  Matrix previous;
  for (int de = 1; de <= e_max; ++de) {
    RatioSpec rs;
    rs.d_ref = de;
    rs.q = q;
    rs.p = p;
    rs.maximize = maximize;
    std::vector<Matrix> extra;
    if (previous.size()) extra.push_back(pad_reference(previous, de - 1, phi.d_in));
    const RatioOptimum o = optimize_ratio(phi, rs, cfg, extra, 30 + static_cast<std::uint64_t>(de));
    const double v = std::exp(o.log_value);
    r.sweep_values.push_back(v);
    const bool better = de == 1 || (maximize ? v > r.value : v < r.value);
    if (better) {
      r.value = v;
      r.witness_input = o.witness;
      r.env_dim = de;
      r.iterations = o.iterations;
      r.converged = o.converged;
    }
    previous = o.witness;
  }
  return r;
}

}  // namespace

ChannelNormResult mixed_norm_pos(const CPMap& phi, double q, double p, const OptimizerConfig& cfg) {
  return single(phi, q, p, true, cfg);
}

ChannelNormResult mixed_conorm_pos(const CPMap& phi, double q, double p,
                                   const OptimizerConfig& cfg) {
  return single(phi, q, p, false, cfg);
}

ChannelNormResult cb_norm_estimate(const CPMap& phi, double q, double p, int e_max,
                                   const OptimizerConfig& cfg) {
  return cb_sweep(phi, q, p, e_max, true, cfg);
}

ChannelNormResult cb_conorm_estimate(const CPMap& phi, double q, double p, int e_max,
                                     const OptimizerConfig& cfg) {
  return cb_sweep(phi, q, p, e_max, false, cfg);
}

ChannelNormResult adjoined_norm_pos(const CPMap& phi, int d_t, double q, double p,
                                    const OptimizerConfig& cfg) {
  require_channel_indices(q, p);
  IndexPair{q, 1.0}.require_compatible();
  IndexPair{p, 1.0}.require_compatible();
  cfg.validate();
  RatioSpec rs;
  rs.d_ref = d_t;
  rs.ref_first = false;
  rs.q = q;
  rs.p = p;
  const RatioOptimum o = optimize_ratio(phi, rs, cfg, {}, 40);
  ChannelNormResult r;
  r.value = std::exp(o.log_value);
  r.witness_input = o.witness;
  r.env_dim = d_t;
  r.sweep_values = {r.value};
  r.iterations = o.iterations;
  r.converged = o.converged;
  return r;
}

double max_output_entropy(const CPMap& phi, double p, const OptimizerConfig& cfg) {
  require_alpha(p, 0.5, kInf, true);
  if (p == kInf) return -std::log(mixed_conorm_pos(phi, 1.0, kInf, cfg).value);
  const double pre = p / (1.0 - p);
  const ChannelNormResult r = p < 1.0 ? mixed_norm_pos(phi, 1.0, p, cfg) : mixed_conorm_pos(phi, 1.0, p, cfg);
  return pre * std::log(r.value);
}

double cb_min_output_entropy(const CPMap& phi, double p, int e_max, const OptimizerConfig& cfg) {
  require_alpha(p, 0.5, 1.0, true);
  return p / (1.0 - p) * std::log(cb_conorm_estimate(phi, 1.0, p, e_max, cfg).value);
}

nlohmann::json channel_to_json(const CPMap& phi) {
  nlohmann::json j;
  j["d_in"] = phi.d_in;
  j["d_out"] = phi.d_out;
  j["kraus"] = nlohmann::json::array();
  for (const Matrix& k : phi.kraus) j["kraus"].push_back(io::matrix_to_json(k));
  return j;
}

CPMap channel_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("d_in") || !j.contains("d_out") || !j.contains("kraus"))
    throw ParseError("channel JSON needs d_in, d_out and kraus");
  if (!j["d_in"].is_number_integer() || !j["d_out"].is_number_integer() || !j["kraus"].is_array())
    throw ParseError("channel JSON has malformed fields");
  std::vector<Matrix> ks;
  for (const auto& k : j["kraus"]) ks.push_back(io::matrix_from_json(k));
  return CPMap(std::move(ks), j["d_in"].get<int>(), j["d_out"].get<int>());
}

}  // namespace sqp
