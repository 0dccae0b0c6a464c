#pragma once

// Granular spectrum: fraction of background-subtracted intensity removed by
// each successive erosion, measured after reconstruction by dilation.

#include <algorithm>
#include <string>
#include <vector>

#include "mprof/core.hpp"
#include "mprof/detail/morphology.hpp"

namespace mprof {

struct GranularityParams {
  int spectrum_length = 16;
  int background_radius = 10;

  void validate() const {
    if (spectrum_length < 1 || spectrum_length > 64)
      throw SpecError("granularity spectrum length must be in [1, 64]");
    if (background_radius < 1) throw SpecError("granularity background radius must be >= 1");
  }
};

inline std::vector<FeatureKey> granularity_catalog(const GranularityParams& params) {
  std::vector<FeatureKey> keys;
  for (int i = 1; i <= params.spectrum_length; ++i) keys.push_back({std::to_string(i), ""});
  return keys;
}

namespace detail {

inline Grid<double> crop(const ObjectRegion& region, const ImagePlane& plane) {
  Grid<double> out(region.height(), region.width(), 0.0);
  for (std::size_t r = 0; r < region.height(); ++r)
    for (std::size_t c = 0; c < region.width(); ++c)
      if (region.contains(r, c)) out(r, c) = region.sample(plane, r, c);
  return out;
}

inline double masked_mean(const Grid<double>& img, const ObjectRegion& region) {
  double sum = 0.0;
  for (std::size_t r = 0; r < region.height(); ++r)
    for (std::size_t c = 0; c < region.width(); ++c)
      if (region.contains(r, c)) sum += img(r, c);
  return sum / static_cast<double>(region.pixel_count);
}

}  // namespace detail

/// Grayscale opening of the object's pixels with a disk of `radius`.
inline Grid<double> gray_open(const Grid<double>& img, const ObjectRegion& region, int radius) {
  return detail::open(img, region.local_mask, radius);
}

/// Reconstruction by dilation of `marker` under `limit` within the object.
inline Grid<double> gray_reconstruct(const Grid<double>& marker, const Grid<double>& limit,
                                     const ObjectRegion& region) {
  return detail::reconstruct(marker, limit, region.local_mask);
}

/// Granular spectrum, ordered as granularity_catalog(params). Values are
/// percentages of the background-subtracted mean intensity.
inline Measurements measure_granularity(const ObjectRegion& region, const ImagePlane& plane,
                                        const GranularityParams& params = {}) {
  params.validate();
  const auto& mask = region.local_mask;
  const auto raw = detail::crop(region, plane);
  const auto background = gray_open(raw, region, params.background_radius);
  Grid<double> img(region.height(), region.width(), 0.0);
  for (std::size_t r = 0; r < region.height(); ++r)
    for (std::size_t c = 0; c < region.width(); ++c)
      if (mask(r, c)) img(r, c) = std::max(0.0, raw(r, c) - background(r, c));

  Measurements out;
  const double start = detail::masked_mean(img, region);
  if (start == 0.0) {
    for (int i = 1; i <= params.spectrum_length; ++i) out.push_back({{std::to_string(i), ""}, 0.0});
    return out;
  }
  double prev = start;
  Grid<double> eroded = img;
  for (int i = 1; i <= params.spectrum_length; ++i) {
    eroded = detail::erode(eroded, mask, 1);
    const auto rec = gray_reconstruct(eroded, img, region);
    const double m = detail::masked_mean(rec, region);
    out.push_back({{std::to_string(i), ""}, 100.0 * (prev - m) / start});
    prev = m;
  }
  return out;
}

}  // namespace mprof
