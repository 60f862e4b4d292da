#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "mvsde/errors.hpp"
#include "mvsde/measure.hpp"
#include "mvsde/path.hpp"

namespace mvsde {

/// Closed parameter interval [lo, hi].
struct ThetaDomain {
  double lo = -5.0;
  double hi = 5.0;

  bool contains(double theta) const noexcept { return theta >= lo && theta <= hi; }

  void validate() const {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
      throw ConfigurationError("theta domain must be a finite interval with lo < hi");
    }
  }
};

using DriftFn =
    std::function<double(double theta, const StoppedPath& path, const EmpiricalMeasure& mu)>;
using DiffusionFn = std::function<double(const StoppedPath& path, const EmpiricalMeasure& mu)>;

inline constexpr double kDefaultSigmaFloor = 1e-8;

/// Scalar path- and measure-dependent coefficient model
///   dX_t = b(theta, X_{t^.}, mu_t) dt + sigma(X_{t^.}, mu_t) dW_t.
/// Coefficients only ever see grid samples of the stopped path.
struct ModelSpec {
  std::string name;
  DriftFn drift;
  DiffusionFn diffusion;
  ThetaDomain theta_domain{};
  double sigma_floor = kDefaultSigmaFloor;
};

inline double drift_eval(const ModelSpec& model, double theta, const StoppedPath& path,
                         const EmpiricalMeasure& mu) {
  if (!model.theta_domain.contains(theta)) {
    throw ConfigurationError("theta " + std::to_string(theta) + " outside the domain of model '" +
                             model.name + "'");
  }
  const double b = model.drift(theta, path, mu);
  if (!std::isfinite(b)) {
    throw ModelEvaluationError("drift of model '" + model.name + "' is not finite", theta,
                               path.index());
  }
  return b;
}

inline double diffusion_eval(const ModelSpec& model, const StoppedPath& path,
                             const EmpiricalMeasure& mu) {
  const double s = model.diffusion(path, mu);
  if (!std::isfinite(s)) {
    throw ModelEvaluationError("diffusion of model '" + model.name + "' is not finite",
                               std::nan(""), path.index());
  }
  if (std::abs(s) < model.sigma_floor) {
    throw DegenerateDiffusionError("diffusion of model '" + model.name + "' is " +
                                   std::to_string(s) + " at step " +
                                   std::to_string(path.index()) + ", below the floor");
  }
  return s;
}

/// Mean-field Ornstein-Uhlenbeck model dX = (theta X + beta E[X]) dt + sigma dW, X_0 = x0.
struct LinearModelParams {
  double theta = -0.5;
  double beta = 1.0;
  double sigma = 1.0;
  double x0 = 1.0;

  void validate() const {
    if (!std::isfinite(theta) || !std::isfinite(beta) || !std::isfinite(x0) ||
        !std::isfinite(sigma)) {
      throw ConfigurationError("linear model parameters must be finite");
    }
    if (sigma == 0.0) {
      throw ConfigurationError("linear model needs sigma != 0");
    }
  }
};

/// Builds the linear model. Its theta argument is the drift parameter; the
/// params' own theta is only used by callers that simulate at the truth.
inline ModelSpec make_linear_model(const LinearModelParams& params, ThetaDomain domain = {}) {
  params.validate();
  domain.validate();
  const double beta = params.beta;
  const double sigma = params.sigma;
  ModelSpec model;
  model.name = "linear";
  model.drift = [beta](double theta, const StoppedPath& path, const EmpiricalMeasure& mu) {
    return theta * path.current() + beta * mu.mean();
  };
  model.diffusion = [sigma](const StoppedPath&, const EmpiricalMeasure&) { return sigma; };
  model.theta_domain = domain;
  return model;
}

/// E[X_t] = x0 exp((theta + beta) t) for the linear model.
inline double linear_mean(const LinearModelParams& params, double t) {
  return params.x0 * std::exp((params.theta + params.beta) * t);
}

}  // namespace mvsde
