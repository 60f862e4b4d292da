#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "mvsde/errors.hpp"

namespace mvsde {

/// Grid samples X_0, X_Delta, ..., X_{k Delta} of a trajectory stopped at
/// the grid node t_k. Non-owning: views storage held by an ensemble or by
/// the caller.
class StoppedPath {
 public:
  StoppedPath(std::span<const double> values, double grid_step)
      : values_(values), grid_step_(grid_step) {
    if (values_.empty()) {
      throw ConfigurationError("stopped path needs at least one sample");
    }
    if (!(grid_step_ > 0.0)) {
      throw ConfigurationError("stopped path grid step must be positive");
    }
    // Earlier samples were checked when they were produced.
    if (!std::isfinite(values_.back())) {
      throw ConfigurationError("stopped path sample is not finite");
    }
  }

  std::span<const double> values() const noexcept { return values_; }
  double grid_step() const noexcept { return grid_step_; }

  /// Index k of the last node.
  std::size_t index() const noexcept { return values_.size() - 1; }
  double time() const noexcept { return static_cast<double>(index()) * grid_step_; }
  double current() const noexcept { return values_.back(); }

  double running_max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) {
      m = std::max(m, std::abs(v));
    }
    return m;
  }

 private:
  std::span<const double> values_;
  double grid_step_;
};

}  // namespace mvsde
