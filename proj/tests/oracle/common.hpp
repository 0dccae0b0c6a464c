#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mprof/core.hpp"

namespace oracle {

using Px = std::pair<long, long>;  // (row, col), global
using Features = std::map<std::string, std::optional<double>>;

/// Pixels carrying `label`, by full-image scan in raster order.
inline std::vector<Px> pixels_of(const mprof::LabelMask& mask, mprof::Label label) {
  std::vector<Px> out;
  for (std::size_t r = 0; r < mask.height(); ++r)
    for (std::size_t c = 0; c < mask.width(); ++c)
      if (mask(r, c) == label) out.emplace_back(long(r), long(c));
  return out;
}

inline std::set<Px> as_set(const std::vector<Px>& px) { return {px.begin(), px.end()}; }

inline std::string key_string(const mprof::FeatureKey& k) {
  return k.qualifier.empty() ? k.feature : k.feature + "_" + k.qualifier;
}

inline Features as_features(const mprof::Measurements& ms) {
  Features f;
  for (const auto& m : ms) f[key_string(m.key)] = m.value;
  return f;
}

/// Squared distance from p to the nearest pixel not in `obj`, searching the
/// bounding box grown by one pixel (whose border is all background).
inline double brute_squared_edt(const Px& p, const std::set<Px>& obj, long rmin, long cmin,
                                long rmax, long cmax) {
  double best = -1.0;
  for (long r = rmin - 1; r <= rmax + 1; ++r)
    for (long c = cmin - 1; c <= cmax + 1; ++c) {
      if (obj.count({r, c})) continue;
      const double d = double((r - p.first) * (r - p.first) + (c - p.second) * (c - p.second));
      if (best < 0 || d < best) best = d;
    }
  return best;
}

struct Bounds {
  long rmin, cmin, rmax, cmax;
};

inline Bounds bounds_of(const std::vector<Px>& px) {
  Bounds b{px[0].first, px[0].second, px[0].first, px[0].second};
  for (auto [r, c] : px) {
    b.rmin = std::min(b.rmin, r);
    b.rmax = std::max(b.rmax, r);
    b.cmin = std::min(b.cmin, c);
    b.cmax = std::max(b.cmax, c);
  }
  return b;
}

}  // namespace oracle
