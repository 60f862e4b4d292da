#pragma once

#include <algorithm>
#include <cmath>
#include <variant>
#include <vector>

#include "mvsde/ensemble.hpp"
#include "mvsde/euler.hpp"
#include "mvsde/exact_linear.hpp"
#include "mvsde/model.hpp"
#include "mvsde/stats.hpp"

namespace mvsde {

/// Reference paths from the closed-form Gaussian recursion of the linear model.
struct ExactLinearReference {
  LinearModelParams params;
};

/// Reference paths from EM on a grid `ratio` times finer, driven by the fine
/// increments whose sums drive the coarse run.
struct FineGridReference {
  std::size_t ratio = 64;
};

using Reference = std::variant<ExactLinearReference, FineGridReference>;

struct ErrorReport {
  /// Average over particles and replications of max_k |X_{t_k} - Y_{t_k}|^2.
  double mean_sq_sup_error = 0.0;
  /// 95% normal-approximation half-width of that average.
  double ci_halfwidth = 0.0;
  std::size_t particles = 0;
  std::size_t steps = 0;
  double horizon = 0.0;
  std::size_t replications = 0;
};

/// max_k |X^i_{t_k} - Y^i_{t_k}|^2 for every particle i.
inline std::vector<double> sup_sq_errors(const ParticleEnsemble& reference,
                                         const ParticleEnsemble& scheme) {
  if (!(reference.grid() == scheme.grid())) {
    throw ConfigurationError("reference and scheme ensembles live on different grids");
  }
  std::vector<double> out(scheme.particles(), 0.0);
  for (std::size_t i = 0; i < scheme.particles(); ++i) {
    const auto x = reference.path(i);
    const auto y = scheme.path(i);
    double sup = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double d = x[k] - y[k];
      sup = std::max(sup, d * d);
    }
    out[i] = sup;
  }
  return out;
}

/// Keeps every `ratio`-th node of a fine-grid ensemble.
inline ParticleEnsemble subsample(const ParticleEnsemble& fine, std::size_t ratio) {
  if (ratio < 1 || fine.steps() % ratio != 0) {
    throw ConfigurationError("fine grid is not an integer refinement of the coarse grid");
  }
  GridSpec coarse{fine.particles(), fine.steps() / ratio, fine.horizon()};
  ParticleEnsemble out(coarse, fine.seed(), fine.scheme());
  for (std::size_t i = 0; i < fine.particles(); ++i) {
    for (std::size_t k = 0; k <= coarse.steps; ++k) {
      out(i, k) = fine(i, k * ratio);
    }
  }
  return out;
}

/// Per-particle squared sup errors of one coupled (reference, EM) pair.
inline std::vector<double> coupled_sup_sq_errors(const ModelSpec& model, const Reference& reference,
                                                 double theta, const InitialCondition& init,
                                                 const GridSpec& grid, std::uint64_t seed,
                                                 const SimOptions& options = {}) {
  if (const auto* exact = std::get_if<ExactLinearReference>(&reference)) {
    if (!init.deterministic() || init.mean() != exact->params.x0) {
      throw ConfigurationError("exact linear reference needs the deterministic start x0");
    }
    SimOptions coarse = options;
    coarse.driver_refine = 1;
    const auto x = linear_exact_paths(exact->params, grid, seed, coarse);
    const auto y = euler_maruyama_particles(model, theta, init, grid, seed, coarse);
    return sup_sq_errors(x, y);
  }
  const auto ratio = std::get<FineGridReference>(reference).ratio;
  if (ratio < 1) {
    throw ConfigurationError("fine-grid reference ratio must be >= 1");
  }
  SimOptions fine_opts = options;
  fine_opts.driver_refine = 1;
  const GridSpec fine_grid{grid.particles, grid.steps * ratio, grid.horizon};
  const auto x = subsample(euler_maruyama_particles(model, theta, init, fine_grid, seed, fine_opts),
                           ratio);
  SimOptions coarse = options;
  coarse.driver_refine = ratio;
  const auto y = euler_maruyama_particles(model, theta, init, grid, seed, coarse);
  return sup_sq_errors(x, y);
}

/// Monte Carlo estimate of E[sup_t |X^i_t - Y^i_t|^2] between a reference
/// solution and the particle EM scheme under shared Brownian drivers.
/// Replication r runs with seed + r.
inline ErrorReport strong_error(const ModelSpec& model, const Reference& reference, double theta,
                                const InitialCondition& init, const GridSpec& grid,
                                std::uint64_t seed, std::size_t replications,
                                const SimOptions& options = {}) {
  if (replications < 1) {
    throw ConfigurationError("strong_error needs at least one replication");
  }
  std::vector<double> all;
  all.reserve(grid.particles * replications);
  for (std::size_t r = 0; r < replications; ++r) {
    const auto errs = coupled_sup_sq_errors(model, reference, theta, init, grid, seed + r, options);
    all.insert(all.end(), errs.begin(), errs.end());
  }
  const auto summary = summarize(all);
  ErrorReport report;
  report.mean_sq_sup_error = summary.mean;
  report.ci_halfwidth = 1.959963984540054 * summary.standard_error();
  report.particles = grid.particles;
  report.steps = grid.steps;
  report.horizon = grid.horizon;
  report.replications = replications;
  return report;
}

}  // namespace mvsde
