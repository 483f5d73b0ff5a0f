#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include "schatten_qp/channels.hpp"
#include "schatten_qp/entropy.hpp"
#include "schatten_qp/io.hpp"
#include "schatten_qp/qnorm.hpp"
#include "schatten_qp/verify.hpp"

namespace sqp::cli {

using nlohmann::json;

double parse_index(const std::string& token) {
  std::string t = token;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (t == "inf" || t == "infinity") return kInf;
  auto number = [&](const std::string& s) {
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ParseError("cannot parse index '" + token + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw ParseError("cannot parse index '" + token + "'");
    return v;
  };
  double v;
  if (const size_t slash = t.find('/'); slash != std::string::npos) {
    const double den = number(t.substr(slash + 1));
    if (den == 0.0) throw ParseError("zero denominator in index '" + token + "'");
    v = number(t.substr(0, slash)) / den;
  } else {
    v = number(t);
  }
  if (!(v > 0.0)) throw BadIndex("index '" + token + "' must lie in (0, inf]");
  return v;
}

namespace {

struct Shared {
  std::optional<std::uint64_t> seed;
  std::optional<int> restarts;
  std::optional<int> max_iters;
  std::optional<double> tol;
  bool bits = false;
  bool verbose = false;
  std::string out;

  OptimizerConfig apply(OptimizerConfig c) const {
    if (seed) c.seed = *seed;
    if (restarts) c.restarts = *restarts;
    if (max_iters) c.max_iters = *max_iters;
    if (tol) c.tol_obj = *tol;
    c.validate();
    return c;
  }
  double unit(double nats) const { return bits ? nats / std::log(2.0) : nats; }
  const char* unit_name() const { return bits ? "bits" : "nats"; }
};

void add_shared(CLI::App* app, Shared& s) {
  app->add_option("--seed", s.seed, "Optimizer seed");
  app->add_option("--restarts", s.restarts, "Random restarts besides the flat start");
  app->add_option("--max-iters", s.max_iters, "Iterations per start");
  app->add_option("--tol", s.tol, "Relative objective tolerance");
  app->add_flag("--bits", s.bits, "Report entropies in bits");
  app->add_option("--out", s.out, "Write the JSON result to this file");
  app->add_flag("--verbose", s.verbose, "Progress messages on standard error");
}

void emit(const json& j, const Shared& s, std::ostream& out) {
  const std::string text = io::dump_rounded(j) + "\n";
  if (s.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(s.out);
  if (!f) throw ParseError("cannot write " + s.out);
  f << text;
}

// Reads a matrix file; --dims overrides dims stored in the file.
BipartiteOperator read_operator(const std::string& path, const std::vector<int>& dims_flag) {
  Dims dims;
  Matrix m = io::matrix_from_json(io::read_json_file(path), &dims);
  if (!dims_flag.empty()) dims = dims_flag;
  if (dims.empty()) throw ParseError("no dims given: use --dims or a \"dims\" field");
  if (dims_product(dims) != m.rows() || m.rows() != m.cols())
    throw ParseError("dims do not multiply to the matrix size");
  return BipartiteOperator(std::move(m), dims);
}

const char* bound_kind(IndexPair idx) {
  if (idx.q == idx.p) return "exact";
  return idx.sup_type() ? "lower" : "upper";
}

struct NormArgs {
  std::string input;
  std::vector<int> dims;
  std::string q = "1", p = "1";
};

int cmd_norm(const NormArgs& a, const Shared& s, std::ostream& out) {
  const IndexPair idx{parse_index(a.q), parse_index(a.p)};
  idx.require_compatible();
  const BipartiteOperator x = read_operator(a.input, a.dims);
  const NormResult r = two_index_norm(x, idx, s.apply({}));
  emit({{"command", "norm"},
        {"q", idx.q},
        {"p", idx.p},
        {"dims", x.dims},
        {"value", r.value},
        {"bound", bound_kind(idx)},
        {"converged", r.converged},
        {"iterations", r.iterations},
        {"restart_values", r.restart_values},
        {"witness_a", io::matrix_to_json(r.witness_a)},
        {"witness_b", io::matrix_to_json(r.witness_b)}},
       s, out);
  return kOk;
}

struct EntropyArgs {
  std::string input;
  std::vector<int> dims;
  std::string quantity = "cond";
  std::string alpha = "1/2";
  std::string method = "norm";
};

int cmd_entropy(const EntropyArgs& a, const Shared& s, std::ostream& out) {
  const double alpha = a.quantity == "umlaut-limit" ? 1.0 : parse_index(a.alpha);
  const BipartiteOperator x = read_operator(a.input, a.dims);
  const State rho(x.matrix, x.dims);
  const Method method = a.method == "direct" ? Method::Direct : Method::NormBased;
  json j = {{"command", "entropy"}, {"quantity", a.quantity}, {"unit", s.unit_name()}};
  if (a.quantity == "umlaut-limit") {
    j["value"] = s.unit(umlaut_limit(rho, s.apply({})));
    j["method"] = method_name(Method::NormBased);
    emit(j, s, out);
    return kOk;
  }
  const OptimizerConfig cfg = s.apply(method == Method::Direct ? direct_config() : OptimizerConfig{});
  EntropyResult r;
  if (a.quantity == "cond") {
    r = method == Method::Direct ? conditional_entropy_direct(rho, alpha, cfg)
                                 : conditional_entropy_norm(rho, alpha, cfg);
  } else if (a.quantity == "rev-cond") {
    r = reversed_conditional(rho, alpha, method, cfg);
  } else if (a.quantity == "umlaut") {
    r = umlaut(rho, alpha, method, cfg);
  } else {
    throw ParseError("unknown quantity '" + a.quantity + "'");
  }
  j["alpha"] = alpha;
  j["value"] = s.unit(r.value);
  j["method"] = method_name(r.method);
  j["infinite"] = r.infinite;
  if (r.witness) j["witness"] = io::matrix_to_json(*r.witness);
  emit(j, s, out);
  return kOk;
}

struct ChannelArgs {
  std::string input;
  std::string mode = "norm";
  std::string q = "1", p = "1";
  int e_max = 0;
};

int cmd_channel(const ChannelArgs& a, const Shared& s, std::ostream& out) {
  const CPMap phi = channel_from_json(io::read_json_file(a.input));
  const OptimizerConfig cfg = s.apply(channel_config());
  const double p = parse_index(a.p);
  json j = {{"command", "channel"}, {"mode", a.mode}, {"p", p}};
  if (a.mode == "max-ent" || a.mode == "cb-min-ent") {
    const double v = a.mode == "max-ent" ? max_output_entropy(phi, p, cfg)
                                         : cb_min_output_entropy(phi, p, a.e_max, cfg);
    j["value"] = s.unit(v);
    j["unit"] = s.unit_name();
    emit(j, s, out);
    return kOk;
  }
  const double q = parse_index(a.q);
  j["q"] = q;
  ChannelNormResult r;
  if (a.mode == "norm") {
    r = mixed_norm_pos(phi, q, p, cfg);
  } else if (a.mode == "conorm") {
    r = mixed_conorm_pos(phi, q, p, cfg);
  } else if (a.mode == "cb-norm") {
    r = cb_norm_estimate(phi, q, p, a.e_max, cfg);
  } else if (a.mode == "cb-conorm") {
    r = cb_conorm_estimate(phi, q, p, a.e_max, cfg);
  } else {
    throw ParseError("unknown channel mode '" + a.mode + "'");
  }
  const bool sup = a.mode == "norm" || a.mode == "cb-norm";
  j["value"] = r.value;
  j["bound"] = sup ? "lower" : "upper";
  j["env_dim"] = r.env_dim;
  if (!r.sweep_values.empty()) j["sweep"] = r.sweep_values;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["witness_input"] = io::matrix_to_json(r.witness_input);
  emit(j, s, out);
  return kOk;
}

struct VerifyArgs {
  std::vector<std::string> ids;
  bool all = false;
  int trials = 0;
  bool timings = false;
  std::optional<double> product_env;
};

int cmd_verify(const VerifyArgs& a, const Shared& s, std::ostream& out, std::ostream& err) {
  std::vector<CheckSpec> specs;
  const std::uint64_t seed = s.seed.value_or(0);
  const bool all = a.all || std::find(a.ids.begin(), a.ids.end(), "all") != a.ids.end();
  if (all) {
    specs = default_suite(seed, a.trials);
  } else {
    if (a.ids.empty()) throw ParseError("name check ids or pass --all");
    for (const std::string& id : a.ids) {
      if (!is_check(id)) throw UnknownCheck("unknown check id '" + id + "'");
      CheckSpec spec;
      spec.check_id = id;
      spec.trials = a.trials > 0 ? a.trials : default_trials(id);
      spec.seed = seed;
      specs.push_back(spec);
    }
  }
  if (a.product_env)
    for (CheckSpec& spec : specs) spec.options["product_env"] = *a.product_env;
  if (s.verbose) err << "running " << specs.size() << " checks\n";
  const SuiteResult result = run_suite(specs);
  Shared file = s;
  if (file.out.empty()) file.out = "verify_report.json";
  emit(suite_to_json(result, a.timings), file, out);
  out << summary_line(result) << "\n";
  return result.passed() ? kOk : kFailure;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-indexed Schatten quasi-norms, entropies and channel norms", "schatten-qp"};
  app.require_subcommand(1);
  Shared shared;

  NormArgs norm;
  CLI::App* c_norm = app.add_subcommand("norm", "Two-indexed norm of an operator");
  c_norm->add_option("input", norm.input, "Matrix JSON file")->required();
  c_norm->add_option("--dims", norm.dims, "Factor dimensions")->delimiter(',');
  c_norm->add_option("--q", norm.q, "First-factor index");
  c_norm->add_option("--p", norm.p, "Second-factor index");
  add_shared(c_norm, shared);

  EntropyArgs ent;
  CLI::App* c_ent = app.add_subcommand("entropy", "Conditional entropies of a bipartite state");
  c_ent->add_option("input", ent.input, "State JSON file")->required();
  c_ent->add_option("--dims", ent.dims, "Factor dimensions (A,B)")->delimiter(',');
  c_ent->add_option("--quantity", ent.quantity, "cond | rev-cond | umlaut | umlaut-limit")
      ->check(CLI::IsMember({"cond", "rev-cond", "umlaut", "umlaut-limit"}));
  c_ent->add_option("--alpha", ent.alpha, "Renyi parameter");
  c_ent->add_option("--method", ent.method, "norm | direct")->check(CLI::IsMember({"norm", "direct"}));
  add_shared(c_ent, shared);

  ChannelArgs chan;
  CLI::App* c_chan = app.add_subcommand("channel", "Norms and entropies of a CP map");
  c_chan->add_option("input", chan.input, "Channel JSON file")->required();
  c_chan->add_option("--mode", chan.mode, "norm | conorm | cb-norm | cb-conorm | max-ent | cb-min-ent")
      ->check(CLI::IsMember({"norm", "conorm", "cb-norm", "cb-conorm", "max-ent", "cb-min-ent"}));
  c_chan->add_option("--q", chan.q, "Input index");
  c_chan->add_option("--p", chan.p, "Output index");
  c_chan->add_option("--e-max", chan.e_max, "Largest reference dimension (0 = input dimension)");
  add_shared(c_chan, shared);

  VerifyArgs ver;
  CLI::App* c_ver = app.add_subcommand("verify", "Run property checks");
  c_ver->add_option("ids", ver.ids, "Check ids, or 'all'");
  c_ver->add_flag("--all", ver.all, "Run every registered check");
  c_ver->add_option("--trials", ver.trials, "Trials per check (0 = check defaults)");
  c_ver->add_flag("--timings", ver.timings, "Include wall times in the report");
  c_ver->add_option("--product-env", ver.product_env,
                    "Reference dimension for product channels in the multiplicativity checks");
  c_ver->add_flag_function("--list", [&out](std::int64_t) {
    for (const std::string& id : check_ids()) out << id << "\n";
    throw CLI::Success();
  }, "List check ids and exit");
  add_shared(c_ver, shared);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);  // prints help when asked
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParse;
  }

  if (c_norm->parsed()) return cmd_norm(norm, shared, out);
  if (c_ent->parsed()) return cmd_entropy(ent, shared, out);
  if (c_chan->parsed()) return cmd_channel(chan, shared, out);
  return cmd_verify(ver, shared, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const UnknownCheck& e) {
    err << "error: " << e.what() << "\n";
    return kUnknownCheck;
  } catch (const BadIndex& e) {
    err << "error: " << e.what() << "\n";
    return kBadIndex;
  } catch (const RankDeficient& e) {
    err << "error: " << e.what() << "\n";
    return kRankDeficient;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParse;
  } catch (const ShapeMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kParse;
  } catch (const InvalidState& e) {
    err << "error: " << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace sqp::cli
