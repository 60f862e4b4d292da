#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "mvsde/errors.hpp"
#include "mvsde/stats.hpp"

namespace mvsde {

/// Equal-weight empirical measure (1/N) sum_i delta_{x_i} on the real line.
///
/// Atoms are kept in ascending order, so every statistic computed from a
/// measure is invariant under relabelling of the particles that produced it.
class EmpiricalMeasure {
 public:
  explicit EmpiricalMeasure(std::vector<double> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) {
      throw ConfigurationError("empirical measure needs at least one atom");
    }
    for (double a : atoms_) {
      if (!std::isfinite(a)) {
        throw ConfigurationError("empirical measure atoms must be finite");
      }
    }
    std::sort(atoms_.begin(), atoms_.end());
    double total = 0.0;
    for (double a : atoms_) {
      total += a;
    }
    mean_ = total / static_cast<double>(atoms_.size());
  }

  static EmpiricalMeasure dirac(double x) { return EmpiricalMeasure({x}); }

  std::span<const double> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  double mean() const noexcept { return mean_; }

  double second_moment() const {
    double total = 0.0;
    for (double a : atoms_) {
      total += a * a;
    }
    return total / static_cast<double>(atoms_.size());
  }

  friend bool operator==(const EmpiricalMeasure&, const EmpiricalMeasure&) = default;

 private:
  std::vector<double> atoms_;
  double mean_ = 0.0;
};

/// Wasserstein-2 distance between two equal-size empirical measures. In one
/// dimension the monotone (sorted) coupling is optimal.
inline double w2_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.size() != nu.size()) {
    throw UnsupportedConfigurationError(
        "w2_1d requires equal atom counts, got " + std::to_string(mu.size()) +
        " and " + std::to_string(nu.size()));
  }
  const auto a = mu.atoms();
  const auto b = nu.atoms();
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return std::sqrt(total / static_cast<double>(a.size()));
}

/// ||mu||_{lambda^2} = ( integral (1+|x|)^2 mu(dx) )^{1/2}; always >= 1.
inline double lambda2_norm(const EmpiricalMeasure& mu) {
  double total = 0.0;
  for (double a : mu.atoms()) {
    const double w = 1.0 + std::abs(a);
    total += w * w;
  }
  return std::sqrt(total / static_cast<double>(mu.size()));
}

/// Convergence rate of the empirical measure in squared W2 for dimension d:
/// N^{-1/2} (d < 4), N^{-1/2} log N (d = 4), N^{-1/d} (d > 4).
inline double gamma_rate(double n, int dimension) {
  if (!(n >= 1.0) || dimension < 1) {
    throw ConfigurationError("gamma_rate needs N >= 1 and d >= 1");
  }
  if (dimension < 4) {
    return 1.0 / std::sqrt(n);
  }
  if (dimension == 4) {
    return std::log(n) / std::sqrt(n);
  }
  return std::pow(n, -1.0 / static_cast<double>(dimension));
}

}  // namespace mvsde
