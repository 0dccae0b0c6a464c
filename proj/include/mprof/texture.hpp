#pragma once

// Haralick features from symmetric gray-level co-occurrence matrices built
// from pixel pairs that both lie inside the object.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mprof/core.hpp"
#include "mprof/detail/stats.hpp"

namespace mprof {

struct TextureParams {
  int distance = 1;
  int gray_levels = 8;

  void validate() const {
    if (distance < 1) throw SpecError("texture distance must be >= 1");
    if (gray_levels < 2 || gray_levels > 256)
      throw SpecError("texture gray levels must be in [2, 256]");
  }

  std::string qualifier() const {
    return "d" + std::to_string(distance) + "_g" + std::to_string(gray_levels);
  }
};

inline constexpr std::array<const char*, 13> kHaralickNames = {
    "AngularSecondMoment", "Contrast",          "Correlation",       "Variance",
    "InverseDifferenceMoment", "SumAverage",    "SumVariance",       "SumEntropy",
    "Entropy",             "DifferenceVariance", "DifferenceEntropy", "InfoMeas1",
    "InfoMeas2"};

inline std::vector<FeatureKey> texture_catalog(const TextureParams& params) {
  std::vector<FeatureKey> keys;
  for (const char* name : kHaralickNames) keys.push_back({name, params.qualifier()});
  return keys;
}

/// Row/column step of one of the four co-occurrence directions (0, 45, 90, 135 degrees).
struct Offset {
  std::ptrdiff_t dr;
  std::ptrdiff_t dc;
};

inline std::array<Offset, 4> texture_directions(int distance) {
  const std::ptrdiff_t d = distance;
  return {{{0, d}, {-d, d}, {-d, 0}, {-d, -d}}};
}

/// Per-object equal-width quantization into {0, ..., levels-1} between the
/// object's min and max intensity. Non-object cells are left at 0.
inline Grid<int> quantize(const ObjectRegion& region, const ImagePlane& plane, int levels) {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (std::size_t r = 0; r < region.height(); ++r)
    for (std::size_t c = 0; c < region.width(); ++c) {
      if (!region.contains(r, c)) continue;
      const double v = region.sample(plane, r, c);
      if (first) {
        lo = hi = v;
        first = false;
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  Grid<int> out(region.height(), region.width(), 0);
  if (hi == lo) return out;
  const double g = levels;
  for (std::size_t r = 0; r < region.height(); ++r)
    for (std::size_t c = 0; c < region.width(); ++c) {
      if (!region.contains(r, c)) continue;
      const double v = region.sample(plane, r, c);
      const int level = static_cast<int>(std::floor(g * (v - lo) / (hi - lo)));
      out(r, c) = std::min(levels - 1, level);
    }
  return out;
}

struct Glcm {
  int levels = 0;
  std::vector<double> p;  // levels x levels, row-major
  bool had_pairs = false;

  double operator()(int i, int j) const { return p[static_cast<std::size_t>(i * levels + j)]; }
};

/// Symmetrized, normalized co-occurrence matrix for one pixel offset.
inline Glcm glcm(const Grid<int>& levels_grid, const ObjectRegion& region, int levels,
                 Offset offset) {
  Glcm m;
  m.levels = levels;
  std::vector<std::size_t> counts(static_cast<std::size_t>(levels * levels), 0);
  std::size_t pairs = 0;
  for (std::size_t r = 0; r < region.height(); ++r)
    for (std::size_t c = 0; c < region.width(); ++c) {
      if (!region.contains(r, c)) continue;
      const std::ptrdiff_t rr = static_cast<std::ptrdiff_t>(r) + offset.dr;
      const std::ptrdiff_t cc = static_cast<std::ptrdiff_t>(c) + offset.dc;
      if (!region.contains_signed(rr, cc)) continue;
      const int a = levels_grid(r, c);
      const int b = levels_grid(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
      ++counts[static_cast<std::size_t>(a * levels + b)];
      ++counts[static_cast<std::size_t>(b * levels + a)];
      ++pairs;
    }
  m.p.assign(counts.size(), 0.0);
  if (pairs == 0) return m;
  m.had_pairs = true;
  const double total = 2.0 * static_cast<double>(pairs);
  for (std::size_t k = 0; k < counts.size(); ++k) m.p[k] = static_cast<double>(counts[k]) / total;
  return m;
}

namespace detail {

inline double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace detail

/// The 13 Haralick statistics of a co-occurrence matrix, in kHaralickNames order.
inline std::array<double, 13> haralick(const Glcm& m) {
  const int g = m.levels;
  std::vector<double> px(static_cast<std::size_t>(g), 0.0), py(static_cast<std::size_t>(g), 0.0);
  std::vector<double> p_sum(static_cast<std::size_t>(2 * g - 1), 0.0);
  std::vector<double> p_diff(static_cast<std::size_t>(g), 0.0);
  double asm_ = 0, contrast = 0, idm = 0, entropy = 0, sum_ij = 0;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      const double p = m(i, j);
      px[static_cast<std::size_t>(i)] += p;
      py[static_cast<std::size_t>(j)] += p;
      p_sum[static_cast<std::size_t>(i + j)] += p;
      p_diff[static_cast<std::size_t>(std::abs(i - j))] += p;
      asm_ += p * p;
      contrast += double(i - j) * double(i - j) * p;
      idm += p / (1.0 + double(i - j) * double(i - j));
      entropy -= detail::plogp(p);
      sum_ij += double(i) * double(j) * p;
    }

  double mu_x = 0, mu_y = 0;
  for (int i = 0; i < g; ++i) {
    mu_x += i * px[static_cast<std::size_t>(i)];
    mu_y += i * py[static_cast<std::size_t>(i)];
  }
  double var_x = 0, var_y = 0;
  for (int i = 0; i < g; ++i) {
    var_x += (i - mu_x) * (i - mu_x) * px[static_cast<std::size_t>(i)];
    var_y += (i - mu_y) * (i - mu_y) * py[static_cast<std::size_t>(i)];
  }
  double variance = 0;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) variance += (i - mu_x) * (i - mu_x) * m(i, j);

  const double sd = std::sqrt(var_x) * std::sqrt(var_y);
  const double correlation = sd > 0.0 ? (sum_ij - mu_x * mu_y) / sd : 0.0;

  double sum_avg = 0, sum_entropy = 0;
  for (std::size_t k = 0; k < p_sum.size(); ++k) {
    sum_avg += static_cast<double>(k) * p_sum[k];
    sum_entropy -= detail::plogp(p_sum[k]);
  }
  double sum_var = 0;
  for (std::size_t k = 0; k < p_sum.size(); ++k)
    sum_var += (static_cast<double>(k) - sum_avg) * (static_cast<double>(k) - sum_avg) * p_sum[k];

  double diff_mean = 0, diff_sq = 0, diff_entropy = 0;
  for (std::size_t k = 0; k < p_diff.size(); ++k) {
    const double kd = static_cast<double>(k);
    diff_mean += kd * p_diff[k];
    diff_sq += kd * kd * p_diff[k];
    diff_entropy -= detail::plogp(p_diff[k]);
  }
  const double diff_var = diff_sq - diff_mean * diff_mean;

  double hx = 0, hy = 0, hxy1 = 0, hxy2 = 0;
  for (int i = 0; i < g; ++i) {
    hx -= detail::plogp(px[static_cast<std::size_t>(i)]);
    hy -= detail::plogp(py[static_cast<std::size_t>(i)]);
  }
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      const double q = px[static_cast<std::size_t>(i)] * py[static_cast<std::size_t>(j)];
      const double p = m(i, j);
      if (p > 0.0) hxy1 -= p * std::log2(q);
      hxy2 -= detail::plogp(q);
    }
  const double hmax = std::max(hx, hy);
  const double info1 = hmax > 0.0 ? (entropy - hxy1) / hmax : 0.0;
  const double info2 = std::sqrt(std::max(0.0, 1.0 - std::exp(-2.0 * (hxy2 - entropy))));

  return {asm_,    contrast,    correlation, variance,  idm,          sum_avg,
          sum_var, sum_entropy, entropy,     diff_var,  diff_entropy, info1,
          info2};
}

/// Direction-mean Haralick features, ordered as texture_catalog(params).
/// Directions without any in-object pair are skipped; if none has pairs,
/// every feature is missing.
inline Measurements measure_texture(const ObjectRegion& region, const ImagePlane& plane,
                                    const TextureParams& params = {}) {
  params.validate();
  const auto levels = quantize(region, plane, params.gray_levels);
  std::array<std::vector<double>, 13> per_feature;
  for (const auto& dir : texture_directions(params.distance)) {
    const auto m = glcm(levels, region, params.gray_levels, dir);
    if (!m.had_pairs) continue;
    const auto f = haralick(m);
    for (std::size_t k = 0; k < f.size(); ++k) per_feature[k].push_back(f[k]);
  }
  Measurements out;
  const std::string q = params.qualifier();
  for (std::size_t k = 0; k < kHaralickNames.size(); ++k) {
    Value v;
    if (!per_feature[k].empty()) {
      // sorted summation keeps the mean independent of direction order
      const double n = static_cast<double>(per_feature[k].size());
      v = detail::order_free_sum(per_feature[k]) / n;
    }
    out.push_back({{kHaralickNames[k], q}, v});
  }
  return out;
}

}  // namespace mprof
