#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "mvsde/ensemble.hpp"
#include "mvsde/errors.hpp"
#include "mvsde/model.hpp"
#include "mvsde/parallel.hpp"
#include "mvsde/rng.hpp"

namespace mvsde {

/// States with |y| above this abort the run with a DivergenceError.
inline constexpr double kDivergenceBound = 1e12;

namespace detail {

inline void check_state(double y, std::size_t row, std::size_t step) {
  if (!std::isfinite(y) || std::abs(y) > kDivergenceBound) {
    throw DivergenceError(row, step);
  }
}

inline void check_run(const ModelSpec& model, double theta, const GridSpec& grid,
                      const SimOptions& options) {
  grid.validate();
  options.validate(grid.particles);
  if (!model.drift || !model.diffusion) {
    throw ConfigurationError("model '" + model.name + "' has no coefficient functions");
  }
  if (!model.theta_domain.contains(theta)) {
    throw ConfigurationError("theta outside the model's domain");
  }
  if (grid.steps * options.driver_refine > 0xFFFFFFFFull) {
    throw ConfigurationError("too many steps for the 32-bit noise counter");
  }
}

inline void set_initial(ParticleEnsemble& ensemble, const InitialCondition& init,
                        const SimOptions& options) {
  for (std::size_t i = 0; i < ensemble.particles(); ++i) {
    ensemble(i, 0) = init.draw(ensemble.seed(), options.id_of(i));
    check_state(ensemble(i, 0), i, 0);
  }
}

/// Y_{t_{k+1}} = Y_{t_k} + b dt + sigma dW for one particle whose stopped
/// path is `prefix` (nodes 0..k). With driver_refine = r the increment dW is
/// applied as r consecutive fine increments, in order.
inline double em_update(const ModelSpec& model, double theta, std::span<const double> prefix,
                        double dt, const EmpiricalMeasure& mu, std::uint64_t seed,
                        std::uint64_t id, std::size_t k, const GridSpec& grid,
                        std::size_t refine) {
  const StoppedPath path(prefix, dt);
  const double b = drift_eval(model, theta, path, mu);
  const double s = diffusion_eval(model, path, mu);
  double y = path.current() + b * dt;
  if (refine == 1) {
    return y + s * rng::brownian_increment(seed, id, static_cast<std::uint32_t>(k), dt);
  }
  const double fine_dt = grid.horizon / static_cast<double>(grid.steps * refine);
  for (std::size_t j = 0; j < refine; ++j) {
    y += s * rng::brownian_increment(seed, id, static_cast<std::uint32_t>(k * refine + j),
                                     fine_dt);
  }
  return y;
}

/// Runs EM where the measure used at node k is supplied by `measure_at`.
template <class MeasureAt>
ParticleEnsemble run_em(const ModelSpec& model, double theta, const InitialCondition& init,
                        const GridSpec& grid, std::uint64_t seed, const SimOptions& options,
                        Scheme scheme, MeasureAt&& measure_at) {
  check_run(model, theta, grid, options);
  ParticleEnsemble ensemble(grid, seed, scheme);
  set_initial(ensemble, init, options);
  const double dt = grid.step_size();
  for (std::size_t k = 0; k < grid.steps; ++k) {
    const EmpiricalMeasure& mu = measure_at(ensemble, k);
    parallel_for(grid.particles, options.workers, [&](std::size_t i) {
      const auto prefix = std::span<const double>(ensemble.path(i)).first(k + 1);
      const double y = em_update(model, theta, prefix, dt, mu, seed, options.id_of(i), k, grid,
                                 options.driver_refine);
      check_state(y, i, k + 1);
      ensemble(i, k + 1) = y;
    });
  }
  return ensemble;
}

}  // namespace detail

/// Interacting-particle Euler-Maruyama scheme: at every node the coefficients
/// of each particle see the empirical measure of all N particles.
inline ParticleEnsemble euler_maruyama_particles(const ModelSpec& model, double theta,
                                                 const InitialCondition& init,
                                                 const GridSpec& grid, std::uint64_t seed,
                                                 const SimOptions& options = {}) {
  return detail::run_em(model, theta, init, grid, seed, options, Scheme::euler_maruyama,
                        [](const ParticleEnsemble& e, std::size_t k) { return e.measure(k); });
}

/// EM for each particle against a fixed measure flow (one measure per grid
/// node, M+1 entries; the last one is not used).
inline ParticleEnsemble euler_maruyama_frozen_flow(const ModelSpec& model, double theta,
                                                   const InitialCondition& init,
                                                   const GridSpec& grid, std::uint64_t seed,
                                                   std::span<const EmpiricalMeasure> flow,
                                                   const SimOptions& options = {},
                                                   Scheme scheme = Scheme::picard_iterate) {
  if (flow.size() != grid.steps + 1) {
    throw ConfigurationError("frozen measure flow must have M+1 entries");
  }
  return detail::run_em(model, theta, init, grid, seed, options, scheme,
                        [&](const ParticleEnsemble&, std::size_t k) -> const EmpiricalMeasure& {
                          return flow[k];
                        });
}

}  // namespace mvsde
