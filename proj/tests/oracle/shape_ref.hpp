#pragma once

// Direct-definition shape measurements, written for clarity rather than speed.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <queue>
#include <string>

#include "oracle/common.hpp"

namespace oracle {

/// Convex hull area by gift wrapping over every pixel corner.
inline double hull_area(const std::vector<Px>& px) {
  std::vector<std::pair<double, double>> pts;
  for (auto [r, c] : px)
    for (double dr : {-0.5, 0.5})
      for (double dc : {-0.5, 0.5}) pts.emplace_back(double(c) + dc, double(r) + dr);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  auto cross = [](auto o, auto a, auto b) {
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
  };
  auto dist2 = [](auto a, auto b) {
    return (a.first - b.first) * (a.first - b.first) + (a.second - b.second) * (a.second - b.second);
  };
  std::vector<std::pair<double, double>> hull;
  std::size_t start = 0;  // leftmost-lowest after sort
  std::size_t cur = start;
  do {
    hull.push_back(pts[cur]);
    std::size_t next = (cur + 1) % pts.size();
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const double x = cross(pts[cur], pts[next], pts[k]);
      if (x < 0 || (x == 0 && dist2(pts[cur], pts[k]) > dist2(pts[cur], pts[next]))) next = k;
    }
    cur = next;
  } while (cur != start && hull.size() <= pts.size());

  double twice = 0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    twice += a.first * b.second - b.first * a.second;
  }
  return std::abs(twice) / 2;
}

/// Union-find component count over cells accepted by `pred` inside [r0, r1] x [c0, c1].
template <class Pred>
int count_components(long r0, long c0, long r1, long c1, Pred pred, bool eight) {
  const long h = r1 - r0 + 1, w = c1 - c0 + 1;
  std::vector<long> parent(std::size_t(h * w));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](long x) {
    while (parent[std::size_t(x)] != x) x = parent[std::size_t(x)] = parent[std::size_t(parent[std::size_t(x)])];
    return x;
  };
  for (long r = 0; r < h; ++r)
    for (long c = 0; c < w; ++c) {
      if (!pred(r0 + r, c0 + c)) continue;
      for (long dr = -1; dr <= 1; ++dr)
        for (long dc = -1; dc <= 1; ++dc) {
          if ((dr == 0 && dc == 0) || (!eight && dr != 0 && dc != 0)) continue;
          const long rr = r + dr, cc = c + dc;
          if (rr < 0 || cc < 0 || rr >= h || cc >= w || !pred(r0 + rr, c0 + cc)) continue;
          parent[std::size_t(find(r * w + c))] = find(rr * w + cc);
        }
    }
  int n = 0;
  for (long k = 0; k < h * w; ++k)
    if (pred(r0 + k / w, c0 + k % w) && find(k) == k) ++n;
  return n;
}

inline double factorial(int k) { return std::tgamma(double(k) + 1.0); }

inline double zernike_radial(int n, int m, double rho) {
  double s = 0;
  for (int k = 0; k <= (n - m) / 2; ++k)
    s += std::pow(-1.0, k) * factorial(n - k) /
         (factorial(k) * factorial((n + m) / 2 - k) * factorial((n - m) / 2 - k)) *
         std::pow(rho, n - 2 * k);
  return s;
}

inline Features shape_reference(const mprof::LabelMask& mask, mprof::Label label,
                                 int zernike_order = 9) {
  const auto px = pixels_of(mask, label);
  const auto obj = as_set(px);
  const auto b = bounds_of(px);
  const double n = double(px.size());

  double perimeter = 0;
  for (auto [r, c] : px)
    for (auto [dr, dc] : {Px{-1, 0}, Px{1, 0}, Px{0, -1}, Px{0, 1}})
      if (!obj.count({r + dr, c + dc})) perimeter += 1;

  double mr = 0, mc = 0;
  for (auto [r, c] : px) {
    mr += double(r);
    mc += double(c);
  }
  mr /= n;
  mc /= n;
  double srr = 0, scc = 0, src = 0;
  for (auto [r, c] : px) {
    srr += (double(r) - mr) * (double(r) - mr);
    scc += (double(c) - mc) * (double(c) - mc);
    src += (double(r) - mr) * (double(c) - mc);
  }
  srr /= n;
  scc /= n;
  src /= n;
  // Rayleigh quotients along the principal directions (x = col, y = row).
  const double t = 0.5 * std::atan2(2 * src, scc - srr);
  const double l1 = scc * std::cos(t) * std::cos(t) + 2 * src * std::sin(t) * std::cos(t) +
                    srr * std::sin(t) * std::sin(t);
  const double l2 = scc * std::sin(t) * std::sin(t) - 2 * src * std::sin(t) * std::cos(t) +
                    srr * std::cos(t) * std::cos(t);
  double lmax = std::max(l1, l2), lmin = std::max(0.0, std::min(l1, l2));
  double orientation = l1 >= l2 ? t : t + std::numbers::pi / 2;
  while (orientation > std::numbers::pi / 2) orientation -= std::numbers::pi;
  while (orientation <= -std::numbers::pi / 2) orientation += std::numbers::pi;
  if (scc == srr && src == 0) orientation = 0;

  const int objects = count_components(
      b.rmin, b.cmin, b.rmax, b.cmax, [&](long r, long c) { return obj.count({r, c}) > 0; }, true);
  const int backgrounds = count_components(
      b.rmin - 1, b.cmin - 1, b.rmax + 1, b.cmax + 1,
      [&](long r, long c) { return obj.count({r, c}) == 0; }, false);

  double max_d2 = 0;
  for (const auto& p : px) max_d2 = std::max(max_d2, brute_squared_edt(p, obj, b.rmin, b.cmin, b.rmax, b.cmax));

  const double bbox_area = double((b.rmax - b.rmin + 1) * (b.cmax - b.cmin + 1));
  Features f;
  f["Area"] = n;
  f["Perimeter"] = perimeter;
  f["Extent"] = n / bbox_area;
  f["Centroid_Row"] = mr;
  f["Centroid_Col"] = mc;
  f["MajorAxisLength"] = 4 * std::sqrt(lmax);
  f["MinorAxisLength"] = 4 * std::sqrt(lmin);
  f["Eccentricity"] = lmax > 0 ? std::sqrt(1 - lmin / lmax) : 0.0;
  f["Orientation"] = orientation;
  f["FormFactor"] = 4 * std::numbers::pi * n / (perimeter * perimeter);
  f["Solidity"] = n / hull_area(px);
  f["EulerNumber"] = double(objects - (backgrounds - 1));
  f["BoundingBoxArea"] = bbox_area;
  f["MaxRadius"] = std::sqrt(max_d2);

  double rmax = 0;
  for (auto [r, c] : px) rmax = std::max(rmax, std::hypot(double(r) - mr, double(c) - mc));
  if (rmax == 0) rmax = 1;
  for (int nn = 0; nn <= zernike_order; ++nn)
    for (int m = nn % 2; m <= nn; m += 2) {
      double re = 0, im = 0;
      for (auto [r, c] : px) {
        const double y = double(r) - mr, x = double(c) - mc;
        const double rho = std::min(1.0, std::hypot(x, y) / rmax);
        const double theta = std::atan2(y, x);
        const double rad = zernike_radial(nn, m, rho);
        re += rad * std::cos(m * theta);
        im -= rad * std::sin(m * theta);
      }
      f["Zernike_" + std::to_string(nn) + "_" + std::to_string(m)] =
          (nn + 1) / std::numbers::pi / n * std::hypot(re, im);
    }
  return f;
}

}  // namespace oracle
