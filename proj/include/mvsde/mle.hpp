#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mvsde/ensemble.hpp"
#include "mvsde/euler.hpp"
#include "mvsde/model.hpp"
#include "mvsde/stats.hpp"

namespace mvsde {

/// Discretised Girsanov log-likelihood of one observed particle,
///   l(theta) = sum_k b_k/sigma_k^2 (Y_{k+1} - Y_k) - 1/2 sum_k b_k^2/sigma_k^2 dt,
/// with b_k = b(theta, Y_{t_k ^ .}, mu_{t_k}), sigma_k likewise, and mu_{t_k}
/// the empirical measure of the whole ensemble. Terms that only involve the
/// true parameter are dropped; they shift l by a constant.
///
/// Construction caches the measure flow and the diffusion values, so repeated
/// evaluation costs O(M) drift calls.
class LogLikelihood {
 public:
  LogLikelihood(const ModelSpec& model, const ParticleEnsemble& ensemble, std::size_t observed)
      : model_(&model), ensemble_(&ensemble), observed_(observed) {
    if (observed >= ensemble.particles()) {
      throw ConfigurationError("observed particle index out of range");
    }
    flow_ = measure_flow(ensemble);
    inv_var_.resize(ensemble.steps());
    for (std::size_t k = 0; k < ensemble.steps(); ++k) {
      const double s = diffusion_eval(model, stopped(k), flow_[k]);
      inv_var_[k] = 1.0 / (s * s);
    }
  }

  double operator()(double theta) const {
    const auto path = ensemble_->path(observed_);
    const double dt = ensemble_->step_size();
    double integral = 0.0;
    double quadratic = 0.0;
    for (std::size_t k = 0; k < ensemble_->steps(); ++k) {
      const double b = drift_eval(*model_, theta, stopped(k), flow_[k]);
      integral += b * inv_var_[k] * (path[k + 1] - path[k]);
      quadratic += b * b * inv_var_[k] * dt;
    }
    const double value = integral - 0.5 * quadratic;
    if (!std::isfinite(value)) {
      throw ModelEvaluationError("log-likelihood is not finite", theta, ensemble_->steps());
    }
    return value;
  }

  const ModelSpec& model() const noexcept { return *model_; }
  const ParticleEnsemble& ensemble() const noexcept { return *ensemble_; }

 private:
  StoppedPath stopped(std::size_t k) const {
    return StoppedPath(ensemble_->path(observed_).first(k + 1), ensemble_->step_size());
  }

  const ModelSpec* model_;
  const ParticleEnsemble* ensemble_;
  std::size_t observed_;
  std::vector<EmpiricalMeasure> flow_;
  std::vector<double> inv_var_;
};

inline double log_likelihood(const ModelSpec& model, double theta,
                             const ParticleEnsemble& ensemble, std::size_t observed) {
  return LogLikelihood(model, ensemble, observed)(theta);
}

struct LikelihoodCurve {
  std::vector<double> thetas;
  std::vector<double> values;
  double argmax_theta = 0.0;
  double argmax_value = 0.0;
  std::size_t argmax_index = 0;
};

/// l on G uniformly spaced points of [lo, hi]; ties go to the smallest theta.
template <class Objective>
LikelihoodCurve likelihood_curve(const Objective& loglik, ThetaDomain domain,
                                 std::size_t grid_points) {
  if (grid_points < 3) {
    throw ConfigurationError("likelihood grid needs at least 3 points");
  }
  domain.validate();
  LikelihoodCurve curve;
  curve.thetas.resize(grid_points);
  curve.values.resize(grid_points);
  const double width = domain.hi - domain.lo;
  for (std::size_t j = 0; j < grid_points; ++j) {
    const double theta =
        j + 1 == grid_points
            ? domain.hi
            : domain.lo + width * static_cast<double>(j) / static_cast<double>(grid_points - 1);
    curve.thetas[j] = theta;
    curve.values[j] = loglik(theta);
    if (j == 0 || curve.values[j] > curve.argmax_value) {
      curve.argmax_value = curve.values[j];
      curve.argmax_theta = theta;
      curve.argmax_index = j;
    }
  }
  return curve;
}

enum class EstimateMethod { closed_form, grid_refine };

constexpr std::string_view to_string(EstimateMethod m) {
  return m == EstimateMethod::closed_form ? "closed-form" : "grid-refine";
}

struct EstimateReport {
  double theta_hat = 0.0;
  EstimateMethod method = EstimateMethod::grid_refine;
  double horizon = 0.0;
  std::size_t particles = 0;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  double loglik_at_hat = 0.0;
  /// The maximiser sits on an end of the domain; the domain may be too small.
  bool boundary_flag = false;
};

namespace detail {

inline EstimateReport make_report(const ParticleEnsemble& ensemble, EstimateMethod method,
                                  double theta_hat, double loglik) {
  EstimateReport r;
  r.theta_hat = theta_hat;
  r.method = method;
  r.horizon = ensemble.horizon();
  r.particles = ensemble.particles();
  r.steps = ensemble.steps();
  r.seed = ensemble.seed();
  r.loglik_at_hat = loglik;
  return r;
}

}  // namespace detail

struct Maximum {
  double theta = 0.0;
  double value = 0.0;
  bool at_boundary = false;
};

/// Maximises f over [lo, hi]: a uniform G-point scan (ties to the smallest
/// theta), then golden-section search on the two grid cells around the best
/// point until the bracket is narrower than refine_tol. The refined point
/// replaces the grid point only if it is strictly better.
template <class Objective>
Maximum maximize_on_domain(const Objective& f, ThetaDomain domain, std::size_t grid_points,
                           double refine_tol) {
  if (!(refine_tol > 0.0)) {
    throw ConfigurationError("refine_tol must be > 0");
  }
  const auto curve = likelihood_curve(f, domain, grid_points);
  const std::size_t j = curve.argmax_index;
  double a = curve.thetas[j == 0 ? 0 : j - 1];
  double b = curve.thetas[j + 1 == grid_points ? j : j + 1];
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a >= refine_tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  Maximum best{curve.argmax_theta, curve.argmax_value, false};
  const double mid = 0.5 * (a + b);
  const double f_mid = f(mid);
  if (f_mid > best.value) {
    best.theta = mid;
    best.value = f_mid;
  }
  best.at_boundary = best.theta - domain.lo < refine_tol || domain.hi - best.theta < refine_tol;
  return best;
}

/// Grid-then-golden-section maximum likelihood estimate over the model's domain.
inline EstimateReport mle_argmax(const ModelSpec& model, const ParticleEnsemble& ensemble,
                                 std::size_t observed, std::size_t grid_points = 201,
                                 double refine_tol = 1e-6) {
  const LogLikelihood loglik(model, ensemble, observed);
  const auto best = maximize_on_domain(loglik, model.theta_domain, grid_points, refine_tol);
  auto report = detail::make_report(ensemble, EstimateMethod::grid_refine, best.theta, best.value);
  report.boundary_flag = best.at_boundary;
  return report;
}

/// Closed-form maximiser for the linear model (beta known):
///   theta = [sum Y_k dY_k - beta sum Y_k m_k dt] / [sum Y_k^2 dt],
/// m_k the ensemble mean at t_k. A maximiser outside the domain is clamped
/// and flagged.
inline EstimateReport linear_closed_form_mle(const ParticleEnsemble& ensemble,
                                             const LinearModelParams& known, std::size_t observed,
                                             ThetaDomain domain = {}) {
  if (observed >= ensemble.particles()) {
    throw ConfigurationError("observed particle index out of range");
  }
  domain.validate();
  const auto path = ensemble.path(observed);
  const double dt = ensemble.step_size();
  double cross = 0.0;
  double mean_field = 0.0;
  double energy = 0.0;
  for (std::size_t k = 0; k < ensemble.steps(); ++k) {
    const double y = path[k];
    cross += y * (path[k + 1] - y);
    mean_field += known.beta * y * ensemble.measure(k).mean() * dt;
    energy += y * y * dt;
  }
  if (energy == 0.0) {
    throw DegenerateDataError("observed path is identically zero; theta is not identifiable");
  }
  double theta_hat = (cross - mean_field) / energy;
  const bool outside = !domain.contains(theta_hat);
  theta_hat = std::clamp(theta_hat, domain.lo, domain.hi);
  const auto model = make_linear_model(known, domain);
  const double loglik = log_likelihood(model, theta_hat, ensemble, observed);
  auto report = detail::make_report(ensemble, EstimateMethod::closed_form, theta_hat, loglik);
  report.boundary_flag = outside || theta_hat == domain.lo || theta_hat == domain.hi;
  return report;
}

struct SweepConfig {
  double theta0 = -0.5;
  std::vector<double> horizons;
  std::size_t particles = 2560;
  /// M = max(1, round(steps_per_unit_time * T)), i.e. a fixed step size.
  double steps_per_unit_time = 25.6;
  std::vector<std::uint64_t> seeds;
  std::size_t observed = 0;
  std::size_t grid_points = 201;
  double refine_tol = 1e-6;
  /// When set, estimates use the linear closed form instead of grid-refine.
  std::optional<LinearModelParams> closed_form;

  std::size_t steps_for(double horizon) const {
    const double m = std::round(steps_per_unit_time * horizon);
    return m < 1.0 ? 1 : static_cast<std::size_t>(m);
  }
};

struct SweepRow {
  double horizon = 0.0;
  std::size_t steps = 0;
  double mean_abs_err = 0.0;
  /// Sample standard deviation of theta_hat across seeds.
  double sd = 0.0;
  std::size_t n_seeds = 0;
  double mean_theta_hat = 0.0;
  std::size_t boundary_hits = 0;
  std::vector<EstimateReport> estimates;
};

/// For every horizon and seed: simulate at theta0, estimate, aggregate.
inline std::vector<SweepRow> consistency_sweep(const ModelSpec& model, const InitialCondition& init,
                                               const SweepConfig& config,
                                               const SimOptions& options = {}) {
  if (config.horizons.empty() || config.seeds.empty()) {
    throw ConfigurationError("sweep needs at least one horizon and one seed");
  }
  if (!std::is_sorted(config.horizons.begin(), config.horizons.end())) {
    throw ConfigurationError("sweep horizons must be ascending");
  }
  if (!(config.steps_per_unit_time > 0.0)) {
    throw ConfigurationError("steps per unit time must be > 0");
  }
  std::vector<SweepRow> rows;
  for (double horizon : config.horizons) {
    SweepRow row;
    row.horizon = horizon;
    row.steps = config.steps_for(horizon);
    const GridSpec grid{config.particles, row.steps, horizon};
    std::vector<double> abs_err;
    std::vector<double> hats;
    for (std::uint64_t seed : config.seeds) {
      const auto ensemble = euler_maruyama_particles(model, config.theta0, init, grid, seed, options);
      auto est = config.closed_form
                     ? linear_closed_form_mle(ensemble, *config.closed_form, config.observed,
                                              model.theta_domain)
                     : mle_argmax(model, ensemble, config.observed, config.grid_points,
                                  config.refine_tol);
      abs_err.push_back(std::abs(est.theta_hat - config.theta0));
      hats.push_back(est.theta_hat);
      row.boundary_hits += est.boundary_flag ? 1 : 0;
      row.estimates.push_back(est);
    }
    row.n_seeds = config.seeds.size();
    row.mean_abs_err = summarize(abs_err).mean;
    const auto s = summarize(hats);
    row.mean_theta_hat = s.mean;
    row.sd = s.sd;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mvsde
