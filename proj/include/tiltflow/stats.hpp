#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace tiltflow {

/// Pairwise (cascade) summation in index order. The split points depend only
/// on the length, so the result is reproducible bit for bit.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (const double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double std_error = 0.0;  // of the mean; zero for a single sample
  double min = 0.0;
  double max = 0.0;
};

inline Summary summarize(std::span<const double> xs) {
  Summary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  const double n = static_cast<double>(xs.size());
  s.mean = pairwise_sum(xs) / n;
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  s.min = *lo;
  s.max = *hi;
  if (xs.size() > 1) {
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - s.mean) * (xs[i] - s.mean);
    s.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  }
  return s;
}

}  // namespace tiltflow
