#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "mprof/core.hpp"
#include "mprof/detail/distance.hpp"
#include "mprof/shape.hpp"

namespace mprof {

struct RadialParams {
  int bins = 4;
  static constexpr int kWedges = 8;

  void validate() const {
    if (bins < 1) throw SpecError("radial bin count must be >= 1");
  }

  std::string bin_token(int b) const { return std::to_string(b) + "of" + std::to_string(bins); }
};

inline std::vector<FeatureKey> radial_catalog(const RadialParams& params) {
  std::vector<FeatureKey> keys;
  for (const char* name : {"FracAtD", "MeanFrac", "RadialCV"})
    for (int b = 1; b <= params.bins; ++b) keys.push_back({name, params.bin_token(b)});
  return keys;
}

/// Wedge index in [0, 8) for an angle in [-pi, pi]; boundaries at multiples of pi/4 from -pi.
inline int radial_wedge(double theta) {
  const auto w = static_cast<int>(std::floor(4.0 * (theta + std::numbers::pi) / std::numbers::pi));
  return ((w % RadialParams::kWedges) + RadialParams::kWedges) % RadialParams::kWedges;
}

/// Radial intensity distribution, ordered as radial_catalog(params).
///
/// Each pixel gets a normalized radius rho = dc / (dc + de), with dc the
/// distance to the object centroid and de the distance to the nearest
/// background pixel, and falls in bin min(B, 1 + floor(rho * B)).
inline Measurements measure_radial(const ObjectRegion& region, const ImagePlane& plane,
                                   const RadialParams& params = {}) {
  params.validate();
  const int bins = params.bins;
  const auto mom = detail::pixel_moments(region);
  const auto edge2 = detail::squared_distance_to_background(region);

  std::vector<double> bin_sum(static_cast<std::size_t>(bins), 0.0);
  std::vector<std::size_t> bin_count(static_cast<std::size_t>(bins), 0);
  std::vector<std::array<double, RadialParams::kWedges>> wedge_sum(
      static_cast<std::size_t>(bins), std::array<double, RadialParams::kWedges>{});
  double total = 0.0;

  for (std::size_t r = 0; r < region.height(); ++r)
    for (std::size_t c = 0; c < region.width(); ++c) {
      if (!region.contains(r, c)) continue;
      const double dx = detail::centroid_offset(static_cast<std::int64_t>(c), mom.sum_c, mom.n);
      const double dy = detail::centroid_offset(static_cast<std::int64_t>(r), mom.sum_r, mom.n);
      const double d_center = std::sqrt(dx * dx + dy * dy);
      const double d_edge = std::sqrt(edge2(r, c));
      const double rho = (d_center + d_edge) > 0.0 ? d_center / (d_center + d_edge) : 0.0;
      const int bin = std::min(bins, 1 + static_cast<int>(std::floor(rho * bins))) - 1;
      const double v = region.sample(plane, r, c);
      const auto b = static_cast<std::size_t>(bin);
      bin_sum[b] += v;
      ++bin_count[b];
      wedge_sum[b][static_cast<std::size_t>(radial_wedge(std::atan2(dy, dx)))] += v;
      total += v;
    }

  const double area = static_cast<double>(region.pixel_count);
  std::vector<Value> frac(static_cast<std::size_t>(bins)), mean_frac(frac.size()), cv(frac.size());
  for (std::size_t b = 0; b < frac.size(); ++b) {
    const double pixel_frac = static_cast<double>(bin_count[b]) / area;
    if (total != 0.0) {
      frac[b] = bin_sum[b] / total;
      if (bin_count[b] > 0) mean_frac[b] = *frac[b] / pixel_frac;
    }
    double mean = 0.0;
    for (double w : wedge_sum[b]) mean += w;
    mean /= RadialParams::kWedges;
    if (mean != 0.0) {
      double ss = 0.0;
      for (double w : wedge_sum[b]) ss += (w - mean) * (w - mean);
      cv[b] = std::sqrt(ss / RadialParams::kWedges) / mean;
    }
  }

  Measurements out;
  for (int b = 0; b < bins; ++b) out.push_back({{"FracAtD", params.bin_token(b + 1)}, frac[b]});
  for (int b = 0; b < bins; ++b) out.push_back({{"MeanFrac", params.bin_token(b + 1)}, mean_frac[b]});
  for (int b = 0; b < bins; ++b) out.push_back({{"RadialCV", params.bin_token(b + 1)}, cv[b]});
  return out;
}

}  // namespace mprof
