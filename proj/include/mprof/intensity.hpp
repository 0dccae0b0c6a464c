#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mprof/core.hpp"
#include "mprof/detail/stats.hpp"

namespace mprof {

inline std::vector<FeatureKey> intensity_catalog() {
  std::vector<FeatureKey> keys;
  for (const char* name :
       {"IntegratedIntensity", "MeanIntensity", "MedianIntensity", "StdIntensity", "MinIntensity",
        "MaxIntensity", "MADIntensity", "LowerQuartileIntensity", "UpperQuartileIntensity",
        "IntegratedIntensityEdge", "MeanIntensityEdge", "MassDisplacement"})
    keys.push_back({name, ""});
  return keys;
}

/// Per-object intensity statistics of one channel, ordered as intensity_catalog().
/// Edge pixels are object pixels with at least one 4-neighbour outside the object.
inline Measurements measure_intensity(const ObjectRegion& region, const ImagePlane& plane) {
  std::vector<double> values;
  values.reserve(region.pixel_count);
  double sum = 0.0, edge_sum = 0.0;
  std::size_t edge_count = 0;
  double sum_r = 0.0, sum_c = 0.0, wsum_r = 0.0, wsum_c = 0.0;

  for (std::size_t r = 0; r < region.height(); ++r) {
    for (std::size_t c = 0; c < region.width(); ++c) {
      if (!region.contains(r, c)) continue;
      const double v = region.sample(plane, r, c);
      values.push_back(v);
      sum += v;
      const auto ri = static_cast<std::ptrdiff_t>(r);
      const auto ci = static_cast<std::ptrdiff_t>(c);
      const bool edge = !region.contains_signed(ri - 1, ci) || !region.contains_signed(ri + 1, ci) ||
                        !region.contains_signed(ri, ci - 1) || !region.contains_signed(ri, ci + 1);
      if (edge) {
        edge_sum += v;
        ++edge_count;
      }
      const auto rd = static_cast<double>(r);
      const auto cd = static_cast<double>(c);
      sum_r += rd;
      sum_c += cd;
      wsum_r += v * rd;
      wsum_c += v * cd;
    }
  }

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());

  const auto n = static_cast<double>(values.size());
  // a constant object has its value as the exact mean, so its deviation is exactly 0
  const bool constant = sorted.front() == sorted.back();
  const double mean = constant ? sorted.front() : sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double median = detail::sorted_median(sorted);

  double displacement = 0.0;
  if (sum != 0.0 && !constant) {
    const double dr = sum_r / n - wsum_r / sum;
    const double dc = sum_c / n - wsum_c / sum;
    displacement = std::sqrt(dr * dr + dc * dc);
  }

  Measurements out;
  auto put = [&](const char* name, double v) { out.push_back({{name, ""}, v}); };
  put("IntegratedIntensity", sum);
  put("MeanIntensity", mean);
  put("MedianIntensity", median);
  put("StdIntensity", std::sqrt(ss / n));
  put("MinIntensity", sorted.front());
  put("MaxIntensity", sorted.back());
  put("MADIntensity", detail::median_abs_deviation(values, median));
  put("LowerQuartileIntensity", detail::sorted_quantile(sorted, 0.25));
  put("UpperQuartileIntensity", detail::sorted_quantile(sorted, 0.75));
  put("IntegratedIntensityEdge", edge_sum);
  put("MeanIntensityEdge", constant ? sorted.front() : edge_sum / static_cast<double>(edge_count));
  put("MassDisplacement", displacement);
  return out;
}

}  // namespace mprof
