#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mvsde/errors.hpp"
#include "mvsde/measure.hpp"
#include "mvsde/rng.hpp"

namespace mvsde {

/// N particles on a uniform M-step grid over [0, T].
struct GridSpec {
  std::size_t particles = 1;
  std::size_t steps = 1;
  double horizon = 1.0;

  double step_size() const { return horizon / static_cast<double>(steps); }
  double time(std::size_t k) const { return static_cast<double>(k) * step_size(); }

  void validate() const {
    if (particles < 1) {
      throw ConfigurationError("need at least one particle");
    }
    if (steps < 1) {
      throw ConfigurationError("need at least one time step");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
      throw ConfigurationError("horizon T must be finite and > 0");
    }
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

enum class Scheme { euler_maruyama, exact_linear, picard_iterate };

constexpr std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::euler_maruyama:
      return "euler-maruyama";
    case Scheme::exact_linear:
      return "exact-linear";
    case Scheme::picard_iterate:
      return "picard-iterate";
  }
  return "unknown";
}

/// N x (M+1) array of grid values, row i holding the path of particle i.
class ParticleEnsemble {
 public:
  ParticleEnsemble(GridSpec grid, std::uint64_t seed, Scheme scheme)
      : grid_(grid), seed_(seed), scheme_(scheme) {
    grid_.validate();
    values_.assign(grid_.particles * (grid_.steps + 1), 0.0);
  }

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t particles() const noexcept { return grid_.particles; }
  std::size_t steps() const noexcept { return grid_.steps; }
  double horizon() const noexcept { return grid_.horizon; }
  double step_size() const noexcept { return grid_.step_size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  Scheme scheme() const noexcept { return scheme_; }

  std::span<double> path(std::size_t i) {
    return {values_.data() + i * (grid_.steps + 1), grid_.steps + 1};
  }
  std::span<const double> path(std::size_t i) const {
    return {values_.data() + i * (grid_.steps + 1), grid_.steps + 1};
  }

  double operator()(std::size_t i, std::size_t k) const { return values_[i * (grid_.steps + 1) + k]; }
  double& operator()(std::size_t i, std::size_t k) { return values_[i * (grid_.steps + 1) + k]; }

  std::vector<double> column(std::size_t k) const {
    std::vector<double> out(grid_.particles);
    for (std::size_t i = 0; i < grid_.particles; ++i) {
      out[i] = (*this)(i, k);
    }
    return out;
  }

  /// Empirical measure mu_{t_k} of all particles at grid node k.
  EmpiricalMeasure measure(std::size_t k) const { return EmpiricalMeasure(column(k)); }

  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const ParticleEnsemble&, const ParticleEnsemble&) = default;

 private:
  GridSpec grid_;
  std::uint64_t seed_;
  Scheme scheme_;
  std::vector<double> values_;
};

/// mu_{t_0}, ..., mu_{t_M} of an ensemble.
inline std::vector<EmpiricalMeasure> measure_flow(const ParticleEnsemble& ensemble) {
  std::vector<EmpiricalMeasure> flow;
  flow.reserve(ensemble.steps() + 1);
  for (std::size_t k = 0; k <= ensemble.steps(); ++k) {
    flow.push_back(ensemble.measure(k));
  }
  return flow;
}

/// sup_k W2(a_k, b_k) over two measure flows on the same grid.
inline double sup_w2(std::span<const EmpiricalMeasure> a, std::span<const EmpiricalMeasure> b) {
  if (a.size() != b.size()) {
    throw ConfigurationError("measure flows live on different grids");
  }
  double sup = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sup = std::max(sup, w2_1d(a[k], b[k]));
  }
  return sup;
}

/// Initial law of the particles: a deterministic point x0, or i.i.d.
/// Normal(mean, sd) draws keyed on (seed, particle id).
class InitialCondition {
 public:
  static InitialCondition fixed(double x0) { return InitialCondition(x0, 0.0); }

  static InitialCondition gaussian(double mean, double sd) {
    if (!(sd > 0.0)) {
      throw ConfigurationError("gaussian initial condition needs sd > 0");
    }
    return InitialCondition(mean, sd);
  }

  bool deterministic() const noexcept { return sd_ == 0.0; }
  double mean() const noexcept { return mean_; }
  double sd() const noexcept { return sd_; }

  double draw(std::uint64_t seed, std::uint64_t particle_id) const {
    if (deterministic()) {
      return mean_;
    }
    return mean_ + sd_ * rng::standard_normal(seed, particle_id, 0, rng::Lane::initial);
  }

 private:
  InitialCondition(double mean, double sd) : mean_(mean), sd_(sd) {
    if (!std::isfinite(mean_) || !std::isfinite(sd_)) {
      throw ConfigurationError("initial condition must be finite");
    }
  }

  double mean_;
  double sd_;
};

/// Execution knobs shared by the simulators. None of them changes results
/// except `particle_ids` (which stream drives which row) and `driver_refine`.
struct SimOptions {
  /// Worker threads for per-particle updates.
  std::size_t workers = 1;
  /// Stream id of row i; empty means the identity labelling.
  std::vector<std::uint64_t> particle_ids;
  /// Each coarse increment is the sum of this many fine-grid increments
  /// (the drivers of a refine x finer reference run).
  std::size_t driver_refine = 1;

  std::uint64_t id_of(std::size_t row) const {
    return particle_ids.empty() ? row : particle_ids[row];
  }

  void validate(std::size_t particles) const {
    if (!particle_ids.empty() && particle_ids.size() != particles) {
      throw ConfigurationError("particle id list length must equal N");
    }
    if (driver_refine < 1) {
      throw ConfigurationError("driver refinement must be >= 1");
    }
  }
};

/// A pseudo-random relabelling of 0..n-1 (identity for key 0).
inline std::vector<std::uint64_t> permuted_ids(std::size_t n, std::uint64_t key) {
  std::vector<std::uint64_t> ids(n);
  std::iota(ids.begin(), ids.end(), std::uint64_t{0});
  if (key == 0) {
    return ids;
  }
  std::uint64_t state = key;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng::splitmix64(state) % i;
    std::swap(ids[i - 1], ids[j]);
  }
  return ids;
}

}  // namespace mvsde
