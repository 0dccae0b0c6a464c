#pragma once

// Object-only (mask) measurements: size, moments, convexity, topology and
// Zernike magnitudes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "mprof/core.hpp"
#include "mprof/detail/distance.hpp"
#include "mprof/detail/exact_sum.hpp"

namespace mprof {

struct ShapeParams {
  int zernike_max_order = 9;

  void validate() const {
    if (zernike_max_order < 0 || zernike_max_order > 20)
      throw SpecError("zernike order must be in [0, 20], got " + std::to_string(zernike_max_order));
  }
};

/// (n, m) pairs with 0 <= m <= n <= max_order and n - m even, n-major.
inline std::vector<std::pair<int, int>> zernike_indices(int max_order) {
  std::vector<std::pair<int, int>> out;
  for (int n = 0; n <= max_order; ++n)
    for (int m = n % 2; m <= n; m += 2) out.emplace_back(n, m);
  return out;
}

inline std::vector<FeatureKey> shape_catalog(const ShapeParams& params) {
  std::vector<FeatureKey> keys;
  for (const char* name :
       {"Area", "Perimeter", "Extent", "Centroid_Row", "Centroid_Col", "MajorAxisLength",
        "MinorAxisLength", "Eccentricity", "Orientation", "FormFactor", "Solidity", "EulerNumber",
        "BoundingBoxArea", "MaxRadius"})
    keys.push_back({name, ""});
  for (auto [n, m] : zernike_indices(params.zernike_max_order))
    keys.push_back({"Zernike_" + std::to_string(n) + "_" + std::to_string(m), ""});
  return keys;
}

namespace detail {

/// Exact second moments of pixel centres in local coordinates.
struct PixelMoments {
  std::int64_t n = 0;
  std::int64_t sum_r = 0, sum_c = 0;
  std::int64_t sum_rr = 0, sum_cc = 0, sum_rc = 0;

  /// N^2 times the population (co)variances; exact integers.
  int128 scaled_var_r() const { return int128(n) * sum_rr - int128(sum_r) * sum_r; }
  int128 scaled_var_c() const { return int128(n) * sum_cc - int128(sum_c) * sum_c; }
  int128 scaled_cov_rc() const { return int128(n) * sum_rc - int128(sum_r) * sum_c; }
};

inline PixelMoments pixel_moments(const ObjectRegion& region) {
  PixelMoments m;
  for (std::size_t r = 0; r < region.height(); ++r) {
    for (std::size_t c = 0; c < region.width(); ++c) {
      if (!region.contains(r, c)) continue;
      const auto ri = static_cast<std::int64_t>(r);
      const auto ci = static_cast<std::int64_t>(c);
      ++m.n;
      m.sum_r += ri;
      m.sum_c += ci;
      m.sum_rr += ri * ri;
      m.sum_cc += ci * ci;
      m.sum_rc += ri * ci;
    }
  }
  return m;
}

/// Offset of a local pixel centre from the centroid, (n*x - sum_x) / n.
inline double centroid_offset(std::int64_t coord, std::int64_t sum, std::int64_t n) {
  return static_cast<double>(n * coord - sum) / static_cast<double>(n);
}

inline std::int64_t crack_perimeter(const ObjectRegion& region) {
  std::int64_t p = 0;
  constexpr std::array<std::array<std::ptrdiff_t, 2>, 4> nbrs{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
  for (std::size_t r = 0; r < region.height(); ++r)
    for (std::size_t c = 0; c < region.width(); ++c) {
      if (!region.contains(r, c)) continue;
      for (auto [dr, dc] : nbrs)
        if (!region.contains_signed(static_cast<std::ptrdiff_t>(r) + dr,
                                    static_cast<std::ptrdiff_t>(c) + dc))
          ++p;
    }
  return p;
}

/// Four times the convex hull area of all pixel corner points. Corners are
/// kept in doubled coordinates so the result is an exact integer.
inline std::int64_t hull_area_x4(const ObjectRegion& region) {
  using Pt = std::array<std::int64_t, 2>;
  std::vector<Pt> pts;
  for (std::size_t r = 0; r < region.height(); ++r) {
    std::ptrdiff_t first = -1, last = -1;
    for (std::size_t c = 0; c < region.width(); ++c) {
      if (!region.contains(r, c)) continue;
      if (first < 0) first = static_cast<std::ptrdiff_t>(c);
      last = static_cast<std::ptrdiff_t>(c);
    }
    if (first < 0) continue;
    const auto y = static_cast<std::int64_t>(2 * r);
    for (std::int64_t dy : {-1, 1}) {
      pts.push_back({2 * first - 1, y + dy});
      pts.push_back({2 * last + 1, y + dy});
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return 0;

  auto cross = [](const Pt& o, const Pt& a, const Pt& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<Pt> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);

  std::int64_t twice = 0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    twice += a[0] * b[1] - b[0] * a[1];
  }
  return std::abs(twice) / 2;
}

/// Connected components of cells where `pred(r, c)` holds, on an h x w grid.
template <class Pred>
std::vector<std::int32_t> label_components(std::size_t h, std::size_t w, Pred pred, bool eight,
                                           std::int32_t& count) {
  std::vector<std::int32_t> lab(h * w, -1);
  std::vector<std::size_t> stack;
  count = 0;
  for (std::size_t start = 0; start < h * w; ++start) {
    if (lab[start] >= 0 || !pred(start / w, start % w)) continue;
    lab[start] = count;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      const auto r = static_cast<std::ptrdiff_t>(cur / w);
      const auto c = static_cast<std::ptrdiff_t>(cur % w);
      for (std::ptrdiff_t dr = -1; dr <= 1; ++dr)
        for (std::ptrdiff_t dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          if (!eight && dr != 0 && dc != 0) continue;
          const std::ptrdiff_t rr = r + dr, cc = c + dc;
          if (rr < 0 || cc < 0 || rr >= static_cast<std::ptrdiff_t>(h) ||
              cc >= static_cast<std::ptrdiff_t>(w))
            continue;
          const auto idx = static_cast<std::size_t>(rr) * w + static_cast<std::size_t>(cc);
          if (lab[idx] >= 0 || !pred(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc)))
            continue;
          lab[idx] = count;
          stack.push_back(idx);
        }
    }
    ++count;
  }
  return lab;
}

/// 8-connected object components minus 4-connected enclosed background components.
inline std::int64_t euler_number(const ObjectRegion& region) {
  const std::size_t h = region.height() + 2;
  const std::size_t w = region.width() + 2;
  auto fg = [&](std::size_t r, std::size_t c) {
    return r > 0 && c > 0 && r <= region.height() && c <= region.width() &&
           region.contains(r - 1, c - 1);
  };
  std::int32_t objects = 0, backgrounds = 0;
  label_components(h, w, fg, true, objects);
  // the padded border is one background component; every other one is a hole
  label_components(h, w, [&](std::size_t r, std::size_t c) { return !fg(r, c); }, false,
                   backgrounds);
  return static_cast<std::int64_t>(objects) - (backgrounds - 1);
}

inline std::vector<double> zernike_radial_coefficients(int n, int m) {
  std::array<double, 21> fact{};
  fact[0] = 1.0;
  for (int i = 1; i <= 20; ++i) fact[i] = fact[i - 1] * i;
  std::vector<double> coef;
  for (int k = 0; k <= (n - m) / 2; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    coef.push_back(sign * fact[n - k] / (fact[k] * fact[(n + m) / 2 - k] * fact[(n - m) / 2 - k]));
  }
  return coef;
}

inline std::vector<double> zernike_magnitudes(const ObjectRegion& region, const PixelMoments& mom,
                                              int max_order) {
  const auto indices = zernike_indices(max_order);
  std::vector<std::vector<double>> coefs;
  for (auto [n, m] : indices) coefs.push_back(zernike_radial_coefficients(n, m));

  struct Offset {
    double dx, dy, r;
  };
  std::vector<Offset> offsets;
  offsets.reserve(static_cast<std::size_t>(mom.n));
  double r_max = 0.0;
  for (std::size_t r = 0; r < region.height(); ++r)
    for (std::size_t c = 0; c < region.width(); ++c) {
      if (!region.contains(r, c)) continue;
      const double dx = centroid_offset(static_cast<std::int64_t>(c), mom.sum_c, mom.n);
      const double dy = centroid_offset(static_cast<std::int64_t>(r), mom.sum_r, mom.n);
      const double d = std::sqrt(dx * dx + dy * dy);
      r_max = std::max(r_max, d);
      offsets.push_back({dx, dy, d});
    }
  if (r_max == 0.0) r_max = 1.0;

  std::vector<ExactSum> re(indices.size()), im(indices.size());
  std::vector<double> rho_pow(static_cast<std::size_t>(max_order) + 1);
  std::vector<double> w_re(static_cast<std::size_t>(max_order) + 1);
  std::vector<double> w_im(static_cast<std::size_t>(max_order) + 1);
  for (const auto& o : offsets) {
    const double rho = std::min(1.0, o.r / r_max);
    rho_pow[0] = 1.0;
    for (int k = 1; k <= max_order; ++k) rho_pow[k] = rho_pow[k - 1] * rho;
    // e^{-i theta}; arbitrary (1, 0) at the centroid where only m = 0 survives
    const double u_re = o.r > 0 ? o.dx / o.r : 1.0;
    const double u_im = o.r > 0 ? -o.dy / o.r : 0.0;
    w_re[0] = 1.0;
    w_im[0] = 0.0;
    for (int k = 1; k <= max_order; ++k) {
      w_re[k] = w_re[k - 1] * u_re - w_im[k - 1] * u_im;
      w_im[k] = w_re[k - 1] * u_im + w_im[k - 1] * u_re;
    }
    for (std::size_t j = 0; j < indices.size(); ++j) {
      const auto [n, m] = indices[j];
      double radial = 0.0;
      for (std::size_t k = 0; k < coefs[j].size(); ++k)
        radial += coefs[j][k] * rho_pow[static_cast<std::size_t>(n) - 2 * k];
      re[j].add(radial * w_re[m]);
      im[j].add(radial * w_im[m]);
    }
  }

  std::vector<double> out;
  out.reserve(indices.size());
  const double area = static_cast<double>(mom.n);
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const double n = indices[j].first;
    const double a = re[j].value();
    const double b = im[j].value();
    out.push_back((n + 1.0) / std::numbers::pi / area * std::sqrt(a * a + b * b));
  }
  return out;
}

}  // namespace detail

/// Shape measurements of one object, ordered as shape_catalog(params).
inline Measurements measure_shape(const ObjectRegion& region, const ShapeParams& params = {}) {
  params.validate();
  const auto mom = detail::pixel_moments(region);
  const double area = static_cast<double>(mom.n);
  const double n2 = area * area;

  const double var_c = static_cast<double>(mom.scaled_var_c()) / n2;
  const double var_r = static_cast<double>(mom.scaled_var_r()) / n2;
  const double cov = static_cast<double>(mom.scaled_cov_rc()) / n2;
  const double half_sum = 0.5 * (var_c + var_r);
  const double half_diff = 0.5 * (var_c - var_r);
  const double root = std::sqrt(half_diff * half_diff + cov * cov);
  const double lambda_max = half_sum + root;
  const double lambda_min = std::max(0.0, half_sum - root);

  double orientation = 0.0;
  if (root > 0.0) {
    orientation = 0.5 * std::atan2(2.0 * cov, var_c - var_r);
    if (orientation <= -std::numbers::pi / 2) orientation += std::numbers::pi;
  }
  const double eccentricity = lambda_max > 0.0 ? std::sqrt(1.0 - lambda_min / lambda_max) : 0.0;

  const double perimeter = static_cast<double>(detail::crack_perimeter(region));
  const double bbox_area = static_cast<double>(region.bbox.area());
  const double hull_area = static_cast<double>(detail::hull_area_x4(region)) / 4.0;

  const auto dist2 = detail::squared_distance_to_background(region);
  double max_d2 = 0.0;
  for (double d : dist2.pixels()) max_d2 = std::max(max_d2, d);

  Measurements out;
  auto put = [&](const char* name, double v) { out.push_back({{name, ""}, v}); };
  put("Area", area);
  put("Perimeter", perimeter);
  put("Extent", area / bbox_area);
  put("Centroid_Row", static_cast<double>(region.bbox.row_min) +
                          static_cast<double>(mom.sum_r) / area);
  put("Centroid_Col", static_cast<double>(region.bbox.col_min) +
                          static_cast<double>(mom.sum_c) / area);
  put("MajorAxisLength", 4.0 * std::sqrt(lambda_max));
  put("MinorAxisLength", 4.0 * std::sqrt(lambda_min));
  put("Eccentricity", eccentricity);
  put("Orientation", orientation);
  put("FormFactor", 4.0 * std::numbers::pi * area / (perimeter * perimeter));
  put("Solidity", area / hull_area);
  put("EulerNumber", static_cast<double>(detail::euler_number(region)));
  put("BoundingBoxArea", bbox_area);
  put("MaxRadius", std::sqrt(max_d2));

  const auto zernike = detail::zernike_magnitudes(region, mom, params.zernike_max_order);
  const auto indices = zernike_indices(params.zernike_max_order);
  for (std::size_t j = 0; j < indices.size(); ++j) {
    out.push_back({{"Zernike_" + std::to_string(indices[j].first) + "_" +
                        std::to_string(indices[j].second),
                    ""},
                   zernike[j]});
  }
  return out;
}

}  // namespace mprof
