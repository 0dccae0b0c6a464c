#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "mprof/core.hpp"

namespace mprof::detail {

/// Squared 1D distance transform of a sampled function (lower envelope of
/// parabolas). Inputs and outputs are integer-valued, so results are exact.
inline void squared_edt_1d(const std::vector<double>& f, std::vector<double>& d,
                           std::vector<std::size_t>& v, std::vector<double>& z) {
  const std::size_t n = f.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  d.assign(n, inf);
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  std::size_t k = 0;
  bool any = false;
  auto intersect = [&](std::size_t q, std::size_t p) {
    const double qd = static_cast<double>(q);
    const double pd = static_cast<double>(p);
    return ((f[q] + qd * qd) - (f[p] + pd * pd)) / (2.0 * (qd - pd));
  };
  for (std::size_t q = 0; q < n; ++q) {
    if (f[q] == inf) continue;
    if (!any) {
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      any = true;
      continue;
    }
    double s = intersect(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  if (!any) return;
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (z[k + 1] < static_cast<double>(q)) ++k;
    const double diff = static_cast<double>(q) - static_cast<double>(v[k]);
    d[q] = diff * diff + f[v[k]];
  }
}

/// Squared Euclidean distance from each object pixel centre to the nearest
/// non-object pixel centre. Everything outside the bounding box counts as
/// background, so the grid is evaluated with a one-pixel margin.
inline Grid<double> squared_distance_to_background(const ObjectRegion& region) {
  const std::size_t h = region.height() + 2;
  const std::size_t w = region.width() + 2;
  constexpr double inf = std::numeric_limits<double>::infinity();
  Grid<double> g(h, w, 0.0);
  for (std::size_t r = 0; r < region.height(); ++r)
    for (std::size_t c = 0; c < region.width(); ++c)
      if (region.contains(r, c)) g(r + 1, c + 1) = inf;

  std::vector<double> f, d, z;
  std::vector<std::size_t> v;
  for (std::size_t c = 0; c < w; ++c) {
    f.resize(h);
    for (std::size_t r = 0; r < h; ++r) f[r] = g(r, c);
    squared_edt_1d(f, d, v, z);
    for (std::size_t r = 0; r < h; ++r) g(r, c) = d[r];
  }
  for (std::size_t r = 0; r < h; ++r) {
    f.resize(w);
    for (std::size_t c = 0; c < w; ++c) f[c] = g(r, c);
    squared_edt_1d(f, d, v, z);
    for (std::size_t c = 0; c < w; ++c) g(r, c) = d[c];
  }

  Grid<double> out(region.height(), region.width(), 0.0);
  for (std::size_t r = 0; r < region.height(); ++r)
    for (std::size_t c = 0; c < region.width(); ++c)
      if (region.contains(r, c)) out(r, c) = g(r + 1, c + 1);
  return out;
}

}  // namespace mprof::detail
