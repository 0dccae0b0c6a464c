#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mprof/core.hpp"
#include "mprof/detail/stats.hpp"

namespace mprof {

struct ColocParams {
  double manders_threshold_frac = 0.15;

  void validate() const {
    if (!(manders_threshold_frac >= 0.0 && manders_threshold_frac < 1.0))
      throw SpecError("manders threshold fraction must be in [0, 1)");
  }
};

inline std::vector<FeatureKey> coloc_catalog() {
  std::vector<FeatureKey> keys;
  for (const char* name : {"Pearson", "Slope", "Overlap", "MandersM1", "MandersM2"})
    keys.push_back({name, ""});
  return keys;
}

/// Colocalization statistics of a channel pair over one object, ordered as coloc_catalog().
/// MandersM1 is the fraction of channel-a mass where b exceeds tau * max(b); M2 mirrors it.
inline Measurements measure_coloc(const ObjectRegion& region, const ImagePlane& plane_a,
                                  const ImagePlane& plane_b, const ColocParams& params = {}) {
  params.validate();
  std::vector<double> a, b;
  a.reserve(region.pixel_count);
  b.reserve(region.pixel_count);
  for (std::size_t r = 0; r < region.height(); ++r)
    for (std::size_t c = 0; c < region.width(); ++c) {
      if (!region.contains(r, c)) continue;
      a.push_back(region.sample(plane_a, r, c));
      b.push_back(region.sample(plane_b, r, c));
    }

  // variance is zero exactly when a channel is constant over the object
  const auto [a_lo, a_hi] = std::minmax_element(a.begin(), a.end());
  const auto [b_lo, b_hi] = std::minmax_element(b.begin(), b.end());
  const bool a_varies = *a_lo != *a_hi;
  const bool b_varies = *b_lo != *b_hi;

  const auto mom = detail::pair_moments(a, b);
  Value pearson, slope, overlap, m1, m2;
  if (a_varies && b_varies) {
    pearson = std::clamp(mom.sxy / std::sqrt(mom.sxx * mom.syy), -1.0, 1.0);
  }
  if (a_varies) slope = mom.sxy / mom.sxx;

  double saa = 0, sbb = 0, sab = 0, sum_a = 0, sum_b = 0;
  double max_a = a.front(), max_b = b.front();
  for (std::size_t i = 0; i < a.size(); ++i) {
    saa += a[i] * a[i];
    sbb += b[i] * b[i];
    sab += a[i] * b[i];
    sum_a += a[i];
    sum_b += b[i];
    max_a = std::max(max_a, a[i]);
    max_b = std::max(max_b, b[i]);
  }
  if (saa > 0.0 && sbb > 0.0) overlap = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);

  const double tau = params.manders_threshold_frac;
  const double t_a = tau * max_a;
  const double t_b = tau * max_b;
  double a_coloc = 0, b_coloc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (b[i] > t_b) a_coloc += a[i];
    if (a[i] > t_a) b_coloc += b[i];
  }
  if (sum_a != 0.0) m1 = a_coloc / sum_a;
  if (sum_b != 0.0) m2 = b_coloc / sum_b;

  return {{{"Pearson", ""}, pearson},
          {{"Slope", ""}, slope},
          {{"Overlap", ""}, overlap},
          {{"MandersM1", ""}, m1},
          {{"MandersM2", ""}, m2}};
}

}  // namespace mprof
