#pragma once

#include <cmath>

#include "mvsde/ensemble.hpp"
#include "mvsde/euler.hpp"
#include "mvsde/model.hpp"
#include "mvsde/parallel.hpp"
#include "mvsde/rng.hpp"

namespace mvsde {

namespace detail {

/// expm1(x) / x, continuous at 0.
inline double phi1(double x) { return x == 0.0 ? 1.0 : std::expm1(x) / x; }

/// expm1(2x)/(2x) - phi1(x)^2: the part of the OU step variance (in units of
/// sigma^2 dt) that is independent of the Brownian increment.
inline double residual_variance_factor(double x) {
  if (std::abs(x) < 1e-3) {
    return x * x * (1.0 / 12.0 + x * (1.0 / 12.0 + x * (17.0 / 360.0)));
  }
  const double p = phi1(x);
  return std::max(0.0, std::expm1(2.0 * x) / (2.0 * x) - p * p);
}

}  // namespace detail

/// Exact grid samples of N i.i.d. copies of the linear mean-field model,
/// driven by the same Brownian paths as euler_maruyama_particles with the
/// same seed. Over one step
///   X_{k+1} = e^{theta dt} X_k + beta int_0^dt e^{theta(dt-u)} m(t_k+u) du
///             + sigma int_0^dt e^{theta(dt-u)} dW_u,
/// where m(t) = x0 e^{(theta+beta) t}. The stochastic integral is split into
/// its projection on the step's increment dW_k and an independent remainder
/// drawn from the companion lane, which reproduces the joint law of
/// (dW_k, integral) exactly.
inline ParticleEnsemble linear_exact_paths(const LinearModelParams& params, const GridSpec& grid,
                                           std::uint64_t seed, const SimOptions& options = {}) {
  params.validate();
  grid.validate();
  options.validate(grid.particles);
  if (options.driver_refine != 1) {
    throw ConfigurationError("exact linear paths use the coarse drivers only");
  }
  ParticleEnsemble ensemble(grid, seed, Scheme::exact_linear);
  const double dt = grid.step_size();
  const double x = params.theta * dt;
  const double decay = std::exp(x);
  const double mean_gain = decay * std::expm1(params.beta * dt);
  const double dw_coef = params.sigma * detail::phi1(x);
  const double z_coef = std::abs(params.sigma) * std::sqrt(dt * detail::residual_variance_factor(x));
  const double rate = params.theta + params.beta;

  parallel_for(grid.particles, options.workers, [&](std::size_t i) {
    const std::uint64_t id = options.id_of(i);
    auto path = ensemble.path(i);
    path[0] = params.x0;
    for (std::size_t k = 0; k < grid.steps; ++k) {
      const auto step = static_cast<std::uint32_t>(k);
      const double mean_term = params.x0 * std::exp(rate * grid.time(k)) * mean_gain;
      const double dw = rng::brownian_increment(seed, id, step, dt);
      const double z = rng::standard_normal(seed, id, step, rng::Lane::companion);
      const double next = decay * path[k] + mean_term + dw_coef * dw + z_coef * z;
      detail::check_state(next, i, k + 1);
      path[k + 1] = next;
    }
  });
  return ensemble;
}

}  // namespace mvsde
