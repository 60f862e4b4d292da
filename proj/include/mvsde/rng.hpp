#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "mvsde/errors.hpp"

namespace mvsde::rng {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., Random123).
inline PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

/// Maps 64 random bits to cell midpoints of a 2^-52 grid, so never 0 or 1.
inline double uniform_open01(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Standard normal quantile, Wichura's AS241 (PPND16), relative accuracy
/// about 1e-16 over (0, 1). Uses only rational functions, sqrt and log.
inline double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ConfigurationError("inverse_normal_cdf needs p in (0, 1)");
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
              6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
            1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
          1.3314166789178437745e+2) * r + 3.3871328727963666080e+0);
    const double den =
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
              3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
            5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
          4.2313330701600911252e+1) * r + 1.0);
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    value = num / den;
  }
  return q < 0.0 ? -value : value;
}

/// Independent sub-streams of one (seed, particle) pair.
enum class Lane : std::uint32_t {
  increments = 0,  // Brownian increments driving every scheme
  companion = 1,   // extra normals the exact reference needs for the true coupling
  initial = 2,     // random initial conditions
};

/// One standard normal keyed on (seed, particle, step, lane). Stateless.
inline double standard_normal(std::uint64_t seed, std::uint64_t particle, std::uint32_t step,
                              Lane lane) {
  const PhiloxCounter ctr{step, static_cast<std::uint32_t>(lane),
                          static_cast<std::uint32_t>(particle),
                          static_cast<std::uint32_t>(particle >> 32)};
  const PhiloxKey key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const auto out = philox4x32_10(ctr, key);
  const std::uint64_t bits = (std::uint64_t{out[1]} << 32) | out[0];
  return inverse_normal_cdf(uniform_open01(bits));
}

/// Brownian increment W_{t_{k+1}} - W_{t_k} on a grid of spacing dt.
inline double brownian_increment(std::uint64_t seed, std::uint64_t particle, std::uint32_t step,
                                 double dt) {
  return std::sqrt(dt) * standard_normal(seed, particle, step, Lane::increments);
}

struct NoiseSpec {
  std::uint64_t seed = 0;
  std::uint64_t particle_id = 0;
  std::size_t steps = 1;
  double horizon = 1.0;

  void validate() const {
    if (steps < 1) {
      throw ConfigurationError("noise spec needs steps >= 1");
    }
    if (steps > 0xFFFFFFFFull) {
      throw ConfigurationError("noise spec step count exceeds the 32-bit counter");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
      throw ConfigurationError("noise spec needs a finite horizon > 0");
    }
  }

  double step_size() const { return horizon / static_cast<double>(steps); }
};

/// M i.i.d. Normal(0, T/M) increments for one particle.
inline std::vector<double> brownian_increments(const NoiseSpec& spec) {
  spec.validate();
  const double dt = spec.step_size();
  std::vector<double> out(spec.steps);
  for (std::size_t k = 0; k < spec.steps; ++k) {
    out[k] = brownian_increment(spec.seed, spec.particle_id, static_cast<std::uint32_t>(k), dt);
  }
  return out;
}

/// SplitMix64 finaliser; used to derive permutations and replication keys.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace mvsde::rng
