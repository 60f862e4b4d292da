#pragma once

#include <vector>

#include "mvsde/ensemble.hpp"
#include "mvsde/euler.hpp"
#include "mvsde/model.hpp"

namespace mvsde {

struct PicardOptions {
  double tol = 1e-3;
  std::size_t max_iter = 20;

  void validate() const {
    if (!(tol > 0.0)) {
      throw ConfigurationError("picard tolerance must be > 0");
    }
    if (max_iter < 1) {
      throw ConfigurationError("picard needs max_iter >= 1");
    }
  }
};

struct PicardDiagnostics {
  /// Correction steps performed; equals w2_history.size().
  std::size_t iterates_used = 0;
  /// sup_k W2(mu^{(n+1)}_{t_k}, mu^{(n)}_{t_k}) for n = 1, 2, ...
  std::vector<double> w2_history;
  bool converged = false;
};

struct PicardResult {
  ParticleEnsemble ensemble;
  PicardDiagnostics diagnostics;
};

/// Fixed-point iteration on the law flow, represented by a P-particle
/// ensemble with per-path drivers held fixed across iterations.
///
/// Iterate 0 is the constant path X^{(0)} = xi. Iterate n+1 advances every
/// path by EM against the frozen flow of iterate n. Iterate 1 is the initial
/// solve; each further iterate is a correction whose sup-over-grid W2 gap to
/// its predecessor is recorded. Stops once a gap is below tol, or after
/// max_iter corrections (converged = false, not an error).
inline PicardResult picard_solve(const ModelSpec& model, double theta,
                                 const InitialCondition& init, const GridSpec& grid,
                                 std::uint64_t seed, const PicardOptions& picard = {},
                                 const SimOptions& options = {}) {
  picard.validate();
  grid.validate();
  options.validate(grid.particles);

  std::vector<double> start(grid.particles);
  for (std::size_t i = 0; i < grid.particles; ++i) {
    start[i] = init.draw(seed, options.id_of(i));
  }
  std::vector<EmpiricalMeasure> flow(grid.steps + 1, EmpiricalMeasure(start));

  auto current = euler_maruyama_frozen_flow(model, theta, init, grid, seed, flow, options);
  flow = measure_flow(current);

  PicardDiagnostics diag;
  while (diag.iterates_used < picard.max_iter) {
    auto next = euler_maruyama_frozen_flow(model, theta, init, grid, seed, flow, options);
    auto next_flow = measure_flow(next);
    const double gap = sup_w2(next_flow, flow);
    diag.w2_history.push_back(gap);
    ++diag.iterates_used;
    current = std::move(next);
    flow = std::move(next_flow);
    if (gap < picard.tol) {
      diag.converged = true;
      break;
    }
  }
  return {std::move(current), std::move(diag)};
}

}  // namespace mvsde
