#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace mprof::detail {

/// Quantile by linear interpolation between order statistics, h = (n-1)p.
/// `sorted` must be ascending and non-empty.
inline double sorted_quantile(std::span<const double> sorted, double p) {
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double sorted_median(std::span<const double> sorted) {
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

inline double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return sorted_median(values);
}

/// Unscaled median absolute deviation about `center`.
inline double median_abs_deviation(std::span<const double> values, double center) {
  std::vector<double> dev(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) dev[i] = std::abs(values[i] - center);
  return median(std::move(dev));
}

inline double mean(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

/// Sum that does not depend on the order of the inputs.
inline double order_free_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

struct PairMoments {
  std::size_t n = 0;
  double mean_x = 0.0;
  double mean_y = 0.0;
  double sxx = 0.0;  // centered sums of squares and cross-products
  double syy = 0.0;
  double sxy = 0.0;
};

inline PairMoments pair_moments(std::span<const double> x, std::span<const double> y) {
  PairMoments m;
  m.n = x.size();
  if (m.n == 0) return m;
  m.mean_x = mean(x);
  m.mean_y = mean(y);
  for (std::size_t i = 0; i < m.n; ++i) {
    const double dx = x[i] - m.mean_x;
    const double dy = y[i] - m.mean_y;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
  }
  return m;
}

}  // namespace mprof::detail
