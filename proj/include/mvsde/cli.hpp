#pragma once

// Command-line front end: config resolution, experiment orchestration and
// CSV / manifest emission. Kept header-only so tests can drive it in-process.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mvsde/csv.hpp"
#include "mvsde/ensemble.hpp"
#include "mvsde/errors.hpp"
#include "mvsde/euler.hpp"
#include "mvsde/exact_linear.hpp"
#include "mvsde/mle.hpp"
#include "mvsde/model.hpp"
#include "mvsde/picard.hpp"
#include "mvsde/strong_error.hpp"

namespace mvsde::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kNotConverged = 3,
  kDiverged = 4,
  kIoError = 5,
};

struct RunConfig {
  std::string command;
  std::string model = "linear";
  double theta = -0.5;
  double beta = 1.0;
  double sigma = 1.0;
  double x0 = 1.0;
  double x0_sd = 0.0;  // > 0 draws i.i.d. Normal(x0, x0_sd^2) starts
  std::vector<std::size_t> N{160};
  std::vector<std::size_t> M{16};
  std::vector<double> T{1.0};
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds;  // sweep; empty means seed, seed+1, ...
  std::size_t n_seeds = 20;
  std::size_t replications = 10;
  std::string out = "out";
  double theta_lo = -5.0;
  double theta_hi = 5.0;
  std::size_t grid_points = 201;
  double refine_tol = 1e-6;
  double tol = 1e-3;
  std::size_t max_iter = 20;
  std::string reference = "auto";  // auto | exact | fine
  std::size_t reference_ratio = 64;
  std::size_t observed = 0;
  std::vector<std::size_t> show{0};
  bool curve = false;
  std::string method = "auto";  // auto | closed-form | grid-refine
  double steps_per_unit_time = 25.6;
  std::size_t threads = 1;
  std::uint64_t permute_ids = 0;

  bool linear() const { return model == "linear"; }

  LinearModelParams linear_params() const { return {theta, beta, sigma, x0}; }
  ThetaDomain domain() const { return {theta_lo, theta_hi}; }

  InitialCondition initial_condition() const {
    return x0_sd > 0.0 ? InitialCondition::gaussian(x0, x0_sd) : InitialCondition::fixed(x0);
  }

  std::vector<std::uint64_t> sweep_seeds() const {
    if (!seeds.empty()) {
      return seeds;
    }
    std::vector<std::uint64_t> s(n_seeds);
    for (std::size_t i = 0; i < n_seeds; ++i) {
      s[i] = seed + i;
    }
    return s;
  }

  SimOptions sim_options(std::size_t particles) const {
    SimOptions o;
    o.workers = threads;
    if (permute_ids != 0) {
      o.particle_ids = permuted_ids(particles, permute_ids);
    }
    return o;
  }
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"simulate", "error-table", "estimate", "sweep",
                                              "picard"};
  return names;
}

inline RunConfig defaults_for(const std::string& command) {
  RunConfig c;
  c.command = command;
  if (command == "error-table") {
    c.N = {160, 320, 640, 1280, 2560};
    c.M = {16, 32, 64, 128, 256};
  } else if (command == "estimate") {
    c.N = {2560};
    c.M = {256};
    c.T = {10.0};
  } else if (command == "sweep") {
    c.N = {2560};
    c.T = {1.0, 2.0, 5.0, 8.0, 10.0};
  } else if (command == "picard") {
    c.N = {2000};
    c.M = {64};
  }
  return c;
}

inline nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = c.command;
  j["model"] = c.model;
  j["theta"] = c.theta;
  j["beta"] = c.beta;
  j["sigma"] = c.sigma;
  j["x0"] = c.x0;
  j["x0_sd"] = c.x0_sd;
  j["N"] = c.N;
  j["M"] = c.M;
  j["T"] = c.T;
  j["seed"] = c.seed;
  j["seeds"] = c.seeds;
  j["n_seeds"] = c.n_seeds;
  j["replications"] = c.replications;
  j["out"] = c.out;
  j["theta_lo"] = c.theta_lo;
  j["theta_hi"] = c.theta_hi;
  j["grid_points"] = c.grid_points;
  j["refine_tol"] = c.refine_tol;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["reference"] = c.reference;
  j["reference_ratio"] = c.reference_ratio;
  j["observed"] = c.observed;
  j["show"] = c.show;
  j["curve"] = c.curve;
  j["method"] = c.method;
  j["steps_per_unit_time"] = c.steps_per_unit_time;
  j["threads"] = c.threads;
  j["permute_ids"] = c.permute_ids;
  return j;
}

namespace detail {

template <class T>
void read_value(const nlohmann::ordered_json& j, const char* key, T& field) {
  field = j.at(key).get<T>();
}

/// Lists also accept a bare scalar.
template <class T>
void read_list(const nlohmann::ordered_json& j, const char* key, std::vector<T>& field) {
  const auto& v = j.at(key);
  field = v.is_array() ? v.get<std::vector<T>>() : std::vector<T>{v.get<T>()};
}

}  // namespace detail

/// Reads a complete config object; every key must be known.
inline RunConfig from_json(const nlohmann::ordered_json& j) {
  if (!j.is_object()) {
    throw ConfigurationError("config must be a JSON object");
  }
  const auto known = to_json(RunConfig{});
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) {
      throw ConfigurationError("unknown config key '" + key + "'");
    }
  }
  RunConfig c;
  try {
    detail::read_value(j, "command", c.command);
    detail::read_value(j, "model", c.model);
    detail::read_value(j, "theta", c.theta);
    detail::read_value(j, "beta", c.beta);
    detail::read_value(j, "sigma", c.sigma);
    detail::read_value(j, "x0", c.x0);
    detail::read_value(j, "x0_sd", c.x0_sd);
    detail::read_list(j, "N", c.N);
    detail::read_list(j, "M", c.M);
    detail::read_list(j, "T", c.T);
    detail::read_value(j, "seed", c.seed);
    detail::read_list(j, "seeds", c.seeds);
    detail::read_value(j, "n_seeds", c.n_seeds);
    detail::read_value(j, "replications", c.replications);
    detail::read_value(j, "out", c.out);
    detail::read_value(j, "theta_lo", c.theta_lo);
    detail::read_value(j, "theta_hi", c.theta_hi);
    detail::read_value(j, "grid_points", c.grid_points);
    detail::read_value(j, "refine_tol", c.refine_tol);
    detail::read_value(j, "tol", c.tol);
    detail::read_value(j, "max_iter", c.max_iter);
    detail::read_value(j, "reference", c.reference);
    detail::read_value(j, "reference_ratio", c.reference_ratio);
    detail::read_value(j, "observed", c.observed);
    detail::read_list(j, "show", c.show);
    detail::read_value(j, "curve", c.curve);
    detail::read_value(j, "method", c.method);
    detail::read_value(j, "steps_per_unit_time", c.steps_per_unit_time);
    detail::read_value(j, "threads", c.threads);
    detail::read_value(j, "permute_ids", c.permute_ids);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("bad config value: ") + e.what());
  }
  return c;
}

/// Range checks shared by every command.
inline void validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) {
      throw ConfigurationError(what);
    }
  };
  require(std::find(commands().begin(), commands().end(), c.command) != commands().end(),
          "unknown command '" + c.command + "'");
  require(!c.N.empty() && !c.M.empty() && !c.T.empty(), "N, M and T lists must be non-empty");
  require(std::all_of(c.N.begin(), c.N.end(), [](auto n) { return n >= 1; }), "N must be >= 1");
  require(std::all_of(c.M.begin(), c.M.end(), [](auto m) { return m >= 1; }), "M must be >= 1");
  require(std::all_of(c.T.begin(), c.T.end(), [](double t) { return t > 0.0 && std::isfinite(t); }),
          "T must be finite and > 0");
  require(c.replications >= 1, "replications must be >= 1");
  require(c.theta_lo < c.theta_hi, "theta_lo must be < theta_hi");
  require(c.theta >= c.theta_lo && c.theta <= c.theta_hi, "theta outside [theta_lo, theta_hi]");
  require(c.grid_points >= 3, "grid_points must be >= 3");
  require(c.refine_tol > 0.0, "refine_tol must be > 0");
  require(c.tol > 0.0, "tol must be > 0");
  require(c.max_iter >= 1, "max_iter must be >= 1");
  require(c.reference == "auto" || c.reference == "exact" || c.reference == "fine",
          "reference must be auto, exact or fine");
  require(c.reference_ratio >= 1, "reference_ratio must be >= 1");
  require(c.method == "auto" || c.method == "closed-form" || c.method == "grid-refine",
          "method must be auto, closed-form or grid-refine");
  require(c.steps_per_unit_time > 0.0, "steps_per_unit_time must be > 0");
  require(c.threads >= 1, "threads must be >= 1");
  require(c.x0_sd >= 0.0, "x0_sd must be >= 0");
  require(c.n_seeds >= 1 || !c.seeds.empty(), "sweep needs at least one seed");
  require(c.observed < c.N.front(), "observed particle index must be < N");
  require(!c.show.empty(), "show must list at least one particle");
  for (auto i : c.show) {
    require(i < c.N.front(), "show lists a particle index >= N");
  }
  if (c.linear()) {
    require(c.sigma != 0.0, "linear model needs sigma != 0");
  }
}

using ModelFactory = std::function<ModelSpec(const RunConfig&)>;

/// Maps model names to factories. Only the linear mean-field model is built in;
/// library users register further models before calling run().
class ModelRegistry {
 public:
  static ModelRegistry with_builtins() {
    ModelRegistry r;
    r.add("linear", [](const RunConfig& c) {
      return make_linear_model(c.linear_params(), c.domain());
    });
    return r;
  }

  void add(std::string name, ModelFactory factory) { factories_[std::move(name)] = std::move(factory); }

  bool contains(const std::string& name) const { return factories_.count(name) > 0; }

  ModelSpec make(const RunConfig& c) const {
    const auto it = factories_.find(c.model);
    if (it == factories_.end()) {
      throw ConfigurationError("unknown model '" + c.model + "'");
    }
    auto model = it->second(c);
    model.theta_domain = c.domain();
    return model;
  }

 private:
  std::map<std::string, ModelFactory> factories_;
};

struct CommandResult {
  int exit_code = kOk;
  std::vector<std::string> outputs;
  std::vector<std::uint64_t> seeds;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
};

namespace detail {

inline std::filesystem::path prepare_out_dir(const std::string& out) {
  std::error_code ec;
  const std::filesystem::path dir(out);
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + out + "'");
  }
  return dir;
}

inline CommandResult cmd_simulate(const RunConfig& c, const ModelSpec& model,
                                  const std::filesystem::path& dir) {
  const GridSpec grid{c.N.front(), c.M.front(), c.T.front()};
  const auto options = c.sim_options(grid.particles);
  const auto ensemble =
      euler_maruyama_particles(model, c.theta, c.initial_condition(), grid, c.seed, options);
  CommandResult r;
  r.seeds = {c.seed};
  csv::Writer paths(dir / "paths.csv", {"t", "particle_id", "y"});
  for (auto i : c.show) {
    for (std::size_t k = 0; k <= grid.steps; ++k) {
      paths.row(grid.time(k), i, ensemble(i, k));
    }
  }
  paths.close();
  r.outputs.push_back("paths.csv");
  if (c.linear() && c.x0_sd == 0.0) {
    // The exact path coupled to the first shown particle.
    const auto exact = linear_exact_paths(c.linear_params(), grid, c.seed, options);
    csv::Writer ref(dir / "reference.csv", {"t", "x"});
    for (std::size_t k = 0; k <= grid.steps; ++k) {
      ref.row(grid.time(k), exact(c.show.front(), k));
    }
    ref.close();
    r.outputs.push_back("reference.csv");
  }
  return r;
}

inline Reference reference_for(const RunConfig& c) {
  const bool exact = c.reference == "exact" || (c.reference == "auto" && c.linear());
  if (exact) {
    if (!c.linear()) {
      throw ConfigurationError("the exact reference exists only for the linear model");
    }
    return ExactLinearReference{c.linear_params()};
  }
  return FineGridReference{c.reference_ratio};
}

inline CommandResult cmd_error_table(const RunConfig& c, const ModelSpec& model,
                                     const std::filesystem::path& dir) {
  const auto reference = reference_for(c);
  CommandResult r;
  for (std::size_t rep = 0; rep < c.replications; ++rep) {
    r.seeds.push_back(c.seed + rep);
  }
  csv::Writer out(dir / "errors.csv", {"N", "M", "mean_sq_sup_error", "ci_halfwidth", "replications"});
  for (auto n : c.N) {
    for (auto m : c.M) {
      const GridSpec grid{n, m, c.T.front()};
      const auto report = strong_error(model, reference, c.theta, c.initial_condition(), grid,
                                       c.seed, c.replications, c.sim_options(n));
      out.row(n, m, report.mean_sq_sup_error, report.ci_halfwidth, report.replications);
    }
  }
  out.close();
  r.outputs.push_back("errors.csv");
  return r;
}

inline bool use_closed_form(const RunConfig& c) {
  if (c.method == "closed-form") {
    if (!c.linear()) {
      throw ConfigurationError("the closed-form estimator exists only for the linear model");
    }
    return true;
  }
  return c.method == "auto" && c.linear();
}

inline CommandResult cmd_estimate(const RunConfig& c, const ModelSpec& model,
                                  const std::filesystem::path& dir) {
  const GridSpec grid{c.N.front(), c.M.front(), c.T.front()};
  const auto ensemble = euler_maruyama_particles(model, c.theta, c.initial_condition(), grid,
                                                 c.seed, c.sim_options(grid.particles));
  const auto report = use_closed_form(c)
                          ? linear_closed_form_mle(ensemble, c.linear_params(), c.observed, c.domain())
                          : mle_argmax(model, ensemble, c.observed, c.grid_points, c.refine_tol);
  CommandResult r;
  r.seeds = {c.seed};
  csv::Writer out(dir / "estimate.csv", {"theta_hat", "method", "loglik_at_hat", "boundary_flag"});
  out.row(report.theta_hat, to_string(report.method), report.loglik_at_hat, report.boundary_flag);
  out.close();
  r.outputs.push_back("estimate.csv");
  if (c.curve) {
    const LogLikelihood loglik(model, ensemble, c.observed);
    const auto curve = likelihood_curve(loglik, c.domain(), c.grid_points);
    csv::Writer cw(dir / "loglik_curve.csv", {"theta", "loglik"});
    for (std::size_t j = 0; j < curve.thetas.size(); ++j) {
      cw.row(curve.thetas[j], curve.values[j]);
    }
    cw.close();
    r.outputs.push_back("loglik_curve.csv");
  }
  r.extra["boundary_flag"] = report.boundary_flag;
  return r;
}

inline CommandResult cmd_sweep(const RunConfig& c, const ModelSpec& model,
                               const std::filesystem::path& dir) {
  SweepConfig sweep;
  sweep.theta0 = c.theta;
  sweep.horizons = c.T;
  sweep.particles = c.N.front();
  sweep.steps_per_unit_time = c.steps_per_unit_time;
  sweep.seeds = c.sweep_seeds();
  sweep.observed = c.observed;
  sweep.grid_points = c.grid_points;
  sweep.refine_tol = c.refine_tol;
  if (use_closed_form(c)) {
    sweep.closed_form = c.linear_params();
  }
  const auto rows =
      consistency_sweep(model, c.initial_condition(), sweep, c.sim_options(sweep.particles));
  CommandResult r;
  r.seeds = sweep.seeds;
  csv::Writer out(dir / "sweep.csv", {"T", "mean_abs_err", "sd", "n_seeds", "M", "mean_theta_hat",
                                      "boundary_hits"});
  for (const auto& row : rows) {
    out.row(row.horizon, row.mean_abs_err, row.sd, row.n_seeds, row.steps, row.mean_theta_hat,
            row.boundary_hits);
  }
  out.close();
  r.outputs.push_back("sweep.csv");
  return r;
}

inline CommandResult cmd_picard(const RunConfig& c, const ModelSpec& model,
                                const std::filesystem::path& dir) {
  const GridSpec grid{c.N.front(), c.M.front(), c.T.front()};
  const auto result = picard_solve(model, c.theta, c.initial_condition(), grid, c.seed,
                                   PicardOptions{c.tol, c.max_iter}, c.sim_options(grid.particles));
  CommandResult r;
  r.seeds = {c.seed};
  csv::Writer out(dir / "picard.csv", {"iteration", "sup_w2"});
  for (std::size_t n = 0; n < result.diagnostics.w2_history.size(); ++n) {
    out.row(n + 1, result.diagnostics.w2_history[n]);
  }
  out.close();
  r.outputs.push_back("picard.csv");
  r.extra["converged"] = result.diagnostics.converged;
  r.extra["iterates_used"] = result.diagnostics.iterates_used;
  r.exit_code = result.diagnostics.converged ? kOk : kNotConverged;
  return r;
}

inline void write_manifest(const std::filesystem::path& dir, const RunConfig& c,
                           const CommandResult& r) {
  nlohmann::ordered_json m;
  m["tool"] = "mvsde";
  m["command"] = c.command;
  m["config"] = to_json(c);
  m["seeds"] = r.seeds;
  m["outputs"] = r.outputs;
  m["exit_code"] = r.exit_code;
  for (const auto& [k, v] : r.extra.items()) {
    m[k] = v;
  }
  std::ofstream out(dir / "manifest.json");
  out << m.dump(2) << '\n';
  out.close();
  if (!out) {
    throw IoError("failed writing manifest.json");
  }
}

enum class FlagKind { u64, size, real, text, size_list, real_list, u64_list };

struct FlagSpec {
  const char* flag;
  const char* key;
  FlagKind kind;
  const char* help;
};

inline const std::vector<FlagSpec>& flag_specs() {
  static const std::vector<FlagSpec> specs{
      {"--seed", "seed", FlagKind::u64, "base seed of the Brownian drivers"},
      {"--out", "out", FlagKind::text, "output directory"},
      {"--model", "model", FlagKind::text, "model name"},
      {"--N", "N", FlagKind::size_list, "particle count(s), comma separated"},
      {"--M", "M", FlagKind::size_list, "step count(s), comma separated"},
      {"--T", "T", FlagKind::real_list, "horizon(s), comma separated"},
      {"--replications", "replications", FlagKind::size, "seed replications per error cell"},
      {"--theta", "theta", FlagKind::real, "drift parameter used for simulation"},
      {"--beta", "beta", FlagKind::real, "mean-field coupling of the linear model"},
      {"--sigma", "sigma", FlagKind::real, "diffusion of the linear model"},
      {"--x0", "x0", FlagKind::real, "initial value (mean)"},
      {"--x0-sd", "x0_sd", FlagKind::real, "sd of random initial values (0: deterministic)"},
      {"--seeds", "seeds", FlagKind::u64_list, "explicit sweep seeds"},
      {"--n-seeds", "n_seeds", FlagKind::size, "sweep seed count when --seeds is absent"},
      {"--theta-lo", "theta_lo", FlagKind::real, "lower end of the parameter domain"},
      {"--theta-hi", "theta_hi", FlagKind::real, "upper end of the parameter domain"},
      {"--grid-points", "grid_points", FlagKind::size, "likelihood scan points"},
      {"--refine-tol", "refine_tol", FlagKind::real, "golden-section bracket width"},
      {"--tol", "tol", FlagKind::real, "picard tolerance on sup W2"},
      {"--max-iter", "max_iter", FlagKind::size, "picard correction budget"},
      {"--reference", "reference", FlagKind::text, "auto | exact | fine"},
      {"--reference-ratio", "reference_ratio", FlagKind::size, "fine-grid refinement factor"},
      {"--observed", "observed", FlagKind::size, "index of the observed particle"},
      {"--show", "show", FlagKind::size_list, "particles written to paths.csv"},
      {"--method", "method", FlagKind::text, "auto | closed-form | grid-refine"},
      {"--steps-per-unit-time", "steps_per_unit_time", FlagKind::real, "sweep steps per unit T"},
      {"--threads", "threads", FlagKind::size, "worker threads"},
      {"--permute-ids", "permute_ids", FlagKind::u64, "relabel particle streams (0: identity)"},
  };
  return specs;
}

inline std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> parts;
  std::stringstream ss(raw);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (!part.empty()) {
      parts.push_back(part);
    }
  }
  if (parts.empty()) {
    throw ConfigurationError("empty list value '" + raw + "'");
  }
  return parts;
}

inline std::uint64_t parse_u64(const std::string& s) {
  std::size_t used = 0;
  if (s.empty() || s[0] == '-') {
    throw ConfigurationError("expected a non-negative integer, got '" + s + "'");
  }
  const auto v = std::stoull(s, &used);
  if (used != s.size()) {
    throw ConfigurationError("expected an integer, got '" + s + "'");
  }
  return v;
}

inline double parse_real(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) {
    throw ConfigurationError("expected a number, got '" + s + "'");
  }
  return v;
}

inline nlohmann::ordered_json flag_value(const FlagSpec& spec, const std::string& raw) {
  try {
    switch (spec.kind) {
      case FlagKind::u64:
      case FlagKind::size:
        return parse_u64(raw);
      case FlagKind::real:
        return parse_real(raw);
      case FlagKind::text:
        return raw;
      case FlagKind::size_list:
      case FlagKind::u64_list: {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& p : split_list(raw)) {
          arr.push_back(parse_u64(p));
        }
        return arr;
      }
      case FlagKind::real_list: {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& p : split_list(raw)) {
          arr.push_back(parse_real(p));
        }
        return arr;
      }
    }
  } catch (const std::logic_error&) {
    throw ConfigurationError(std::string("bad value '") + raw + "' for " + spec.flag);
  }
  return nullptr;
}

inline nlohmann::ordered_json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigurationError("cannot read config file '" + path + "'");
  }
  try {
    return nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace detail

/// Resolves defaults < config file < flags into a validated RunConfig.
inline RunConfig resolve_config(const std::string& command,
                                const std::optional<std::string>& config_path,
                                const nlohmann::ordered_json& flag_overrides) {
  auto merged = to_json(defaults_for(command));
  auto apply = [&](const nlohmann::ordered_json& layer, const char* origin) {
    for (const auto& [key, value] : layer.items()) {
      if (!merged.contains(key)) {
        throw ConfigurationError(std::string("unknown ") + origin + " key '" + key + "'");
      }
      if (key == "command" && value != command) {
        throw ConfigurationError("config file is for command '" + value.dump() + "', not '" +
                                 command + "'");
      }
      merged[key] = value;
    }
  };
  if (config_path) {
    const auto file = detail::load_config_file(*config_path);
    if (!file.is_object()) {
      throw ConfigurationError("config file must hold a JSON object");
    }
    apply(file, "config");
  }
  apply(flag_overrides, "flag");
  auto config = from_json(merged);
  validate(config);
  return config;
}

/// Executes one resolved config; returns the process exit code.
inline int execute(const RunConfig& config, const ModelRegistry& registry) {
  const auto model = registry.make(config);
  const auto dir = detail::prepare_out_dir(config.out);
  CommandResult result;
  if (config.command == "simulate") {
    result = detail::cmd_simulate(config, model, dir);
  } else if (config.command == "error-table") {
    result = detail::cmd_error_table(config, model, dir);
  } else if (config.command == "estimate") {
    result = detail::cmd_estimate(config, model, dir);
  } else if (config.command == "sweep") {
    result = detail::cmd_sweep(config, model, dir);
  } else {
    result = detail::cmd_picard(config, model, dir);
  }
  detail::write_manifest(dir, config, result);
  return result.exit_code;
}

/// Full command-line entry point. `args` excludes the program name.
inline int run(const std::vector<std::string>& args,
               const ModelRegistry& registry = ModelRegistry::with_builtins(),
               std::ostream& err = std::cerr) {
  CLI::App app{"Interacting-particle simulation and drift MLE for McKean-Vlasov SDEs", "mvsde"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override it)");
  std::map<std::string, std::string> raw;
  for (const auto& spec : detail::flag_specs()) {
    app.add_option(spec.flag, raw[spec.key], spec.help);
  }
  bool curve = false;
  app.add_flag("--curve", curve, "also write loglik_curve.csv (estimate)");

  std::string chosen;
  for (const auto& name : commands()) {
    app.add_subcommand(name, "run the " + name + " experiment")->callback([&chosen, name] {
      chosen = name;
    });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    nlohmann::ordered_json overrides = nlohmann::ordered_json::object();
    for (const auto& spec : detail::flag_specs()) {
      if (app.count(spec.flag) > 0) {
        overrides[spec.key] = detail::flag_value(spec, raw[spec.key]);
      }
    }
    if (app.count("--curve") > 0) {
      overrides["curve"] = curve;
    }
    const auto config = resolve_config(
        chosen, config_path.empty() ? std::nullopt : std::optional<std::string>(config_path),
        overrides);
    const int code = execute(config, registry);
    if (code == kNotConverged) {
      err << "picard iteration did not converge within max_iter\n";
    }
    return code;
  } catch (const ConfigurationError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const UnsupportedConfigurationError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const Error& e) {
    err << "numerical error: " << e.what() << '\n';
    return kDiverged;
  }
}

}  // namespace mvsde::cli
