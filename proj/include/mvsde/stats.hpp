#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace mvsde {

/// Sum of the values taken in ascending order. The result depends only on
/// the multiset of values, never on their order or on how work was split
/// between threads.
inline double ordered_sum(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  for (double v : sorted) {
    total += v;
  }
  return total;
}

struct SampleSummary {
  double mean = 0.0;
  double sd = 0.0;  // n-1 normalisation, 0 for a single value
  std::size_t count = 0;

  /// Standard error of the mean.
  double standard_error() const {
    return count == 0 ? 0.0 : sd / std::sqrt(static_cast<double>(count));
  }
};

/// Order-independent mean and sample standard deviation.
inline SampleSummary summarize(std::span<const double> values) {
  SampleSummary s;
  s.count = values.size();
  if (s.count == 0) {
    return s;
  }
  const auto n = static_cast<double>(s.count);
  s.mean = ordered_sum(values) / n;
  if (s.count > 1) {
    std::vector<double> sq(values.size());
    std::transform(values.begin(), values.end(), sq.begin(), [&](double v) {
      const double d = v - s.mean;
      return d * d;
    });
    s.sd = std::sqrt(ordered_sum(sq) / (n - 1.0));
  }
  return s;
}

}  // namespace mvsde
