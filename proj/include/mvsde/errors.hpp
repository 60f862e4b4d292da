#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mvsde {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration or precondition violation (bad N, M, T, domain, ...).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// A request the library deliberately does not support, e.g. W2 between
/// empirical measures with different atom counts.
class UnsupportedConfigurationError : public Error {
 public:
  using Error::Error;
};

/// A coefficient function returned a non-finite value.
class ModelEvaluationError : public Error {
 public:
  ModelEvaluationError(const std::string& what, double theta, std::size_t step)
      : Error(what + " (theta=" + std::to_string(theta) +
              ", step=" + std::to_string(step) + ")"),
        theta_(theta),
        step_(step) {}

  double theta() const noexcept { return theta_; }
  std::size_t step() const noexcept { return step_; }

 private:
  double theta_;
  std::size_t step_;
};

/// |sigma| fell below the model's floor; the likelihood is undefined there.
class DegenerateDiffusionError : public Error {
 public:
  using Error::Error;
};

/// A particle state left the admissible range (non-finite or |y| > 1e12).
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t particle, std::size_t step)
      : Error("particle " + std::to_string(particle) + " diverged at step " +
              std::to_string(step)),
        particle_(particle),
        step_(step) {}

  std::size_t particle() const noexcept { return particle_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t particle_;
  std::size_t step_;
};

/// Data that admits no estimate (e.g. an observed path that is identically 0).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mvsde
