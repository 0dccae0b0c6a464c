#pragma once

// Feature-table post-processing: robust z-scoring, greedy correlation
// filtering, and per-feature linear-fit R^2 between two tables.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mprof/core.hpp"
#include "mprof/detail/stats.hpp"
#include "mprof/raster_io.hpp"

namespace mprof {

/// Normal-consistency constant relating the MAD to a standard deviation.
inline constexpr double kMadScale = 1.4826;

struct NormalizeParams {
  double corr_threshold = 0.9;
  double drop_missing_frac = 0.05;

  void validate() const {
    if (!(corr_threshold >= 0.0 && corr_threshold <= 1.0))
      throw SpecError("correlation threshold must be in [0, 1]");
    if (!(drop_missing_frac >= 0.0 && drop_missing_frac <= 1.0))
      throw SpecError("missing-fraction threshold must be in [0, 1]");
  }
};

namespace detail {

inline FeatureTable select_columns(const FeatureTable& table, const std::vector<std::size_t>& keep) {
  FeatureTable out;
  out.object_set = table.object_set;
  for (std::size_t k : keep) out.columns.push_back(table.columns[k]);
  out.rows.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    FeatureRow r{row.label, {}};
    r.values.reserve(keep.size());
    for (std::size_t k : keep) r.values.push_back(row.values[k]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

inline std::vector<double> observed(const FeatureTable& table, std::size_t column) {
  std::vector<double> v;
  v.reserve(table.rows.size());
  for (const auto& row : table.rows)
    if (row.values[column]) v.push_back(*row.values[column]);
  return v;
}

}  // namespace detail

/// Robust z-score per feature: (x - median) / (1.4826 * MAD). Features with
/// too many missing cells or zero MAD are dropped; remaining missing cells
/// become 0. Median and MAD are taken over observed values.
inline FeatureTable robust_standardize(const FeatureTable& table, const NormalizeParams& params = {}) {
  params.validate();
  if (table.rows.empty()) throw Error("cannot standardize an empty table");
  const auto n_rows = static_cast<double>(table.rows.size());

  std::vector<std::size_t> keep;
  std::vector<double> centers, scales;
  for (std::size_t k = 0; k < table.columns.size(); ++k) {
    auto values = detail::observed(table, k);
    const double missing_frac = 1.0 - static_cast<double>(values.size()) / n_rows;
    if (values.empty() || missing_frac > params.drop_missing_frac) continue;
    std::sort(values.begin(), values.end());
    const double med = detail::sorted_median(values);
    const double mad = detail::median_abs_deviation(values, med);
    if (mad == 0.0) continue;
    keep.push_back(k);
    centers.push_back(med);
    scales.push_back(kMadScale * mad);
  }

  auto out = detail::select_columns(table, keep);
  for (auto& row : out.rows)
    for (std::size_t j = 0; j < keep.size(); ++j) {
      auto& v = row.values[j];
      v = v ? (*v - centers[j]) / scales[j] : 0.0;
    }
  return out;
}

/// Pearson correlation over rows where both columns are present; 0 when
/// either side has no variance.
inline double column_correlation(const FeatureTable& table, std::size_t a, std::size_t b) {
  std::vector<double> x, y;
  for (const auto& row : table.rows) {
    if (row.values[a] && row.values[b]) {
      x.push_back(*row.values[a]);
      y.push_back(*row.values[b]);
    }
  }
  const auto m = detail::pair_moments(x, y);
  if (m.sxx <= 0.0 || m.syy <= 0.0) return 0.0;
  return m.sxy / std::sqrt(m.sxx * m.syy);
}

/// Greedy scan in column order: a feature is kept unless its |correlation|
/// with an already kept feature exceeds `threshold`.
inline FeatureTable correlation_filter(const FeatureTable& table, double threshold) {
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < table.columns.size(); ++k) {
    bool redundant = false;
    for (std::size_t kept : keep) {
      if (std::abs(column_correlation(table, kept, k)) > threshold) {
        redundant = true;
        break;
      }
    }
    if (!redundant) keep.push_back(k);
  }
  return detail::select_columns(table, keep);
}

/// Standardize, then drop correlated features.
inline FeatureTable normalize(const FeatureTable& table, const NormalizeParams& params = {}) {
  return correlation_filter(robust_standardize(table, params), params.corr_threshold);
}

struct FeatureFit {
  std::string feature;
  Value slope;
  Value intercept;
  Value r2;
  std::size_t n = 0;
};

struct CompareReport {
  std::vector<FeatureFit> fits;

  /// Fraction of features whose R^2 exceeds `threshold` (missing R^2 counts as not exceeding).
  double fraction_above(double threshold) const {
    if (fits.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& f : fits)
      if (f.r2 && *f.r2 > threshold) ++hits;
    return static_cast<double>(hits) / static_cast<double>(fits.size());
  }
};

/// Ordinary least squares fit y = intercept + slope * x with its R^2.
inline FeatureFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  FeatureFit fit;
  fit.n = x.size();
  if (x.empty()) return fit;
  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
  if (*ymin == *ymax) {
    // a constant response is reproduced exactly by the flat line through it
    fit.slope = 0.0;
    fit.intercept = *ymin;
    fit.r2 = 1.0;
    return fit;
  }
  const auto m = detail::pair_moments(x, y);
  if (*xmin == *xmax) {
    fit.slope = 0.0;
    fit.intercept = m.mean_y;
    fit.r2 = 0.0;
    return fit;
  }
  const double slope = m.sxy / m.sxx;
  const double intercept = m.mean_y - slope * m.mean_x;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (intercept + slope * x[i]);
    ss_res += e * e;
  }
  fit.slope = slope;
  fit.intercept = intercept;
  fit.r2 = 1.0 - ss_res / m.syy;
  return fit;
}

/// Per-feature R^2 of b regressed on a, over rows matched by (object set, label)
/// where both values are present. Features are matched by name, in a's order.
inline CompareReport compare_tables(const FeatureTable& a, const FeatureTable& b) {
  std::unordered_map<Label, std::size_t> b_rows;
  if (a.object_set == b.object_set)
    for (std::size_t i = 0; i < b.rows.size(); ++i) b_rows.emplace(b.rows[i].label, i);

  std::vector<std::pair<std::size_t, std::size_t>> matched;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    auto it = b_rows.find(a.rows[i].label);
    if (it != b_rows.end()) matched.emplace_back(i, it->second);
  }
  if (matched.empty()) throw Error("tables share no (object_set, label) rows");

  std::unordered_map<std::string, std::size_t> b_cols;
  for (std::size_t k = 0; k < b.columns.size(); ++k) b_cols.emplace(b.columns[k], k);

  CompareReport report;
  for (std::size_t ka = 0; ka < a.columns.size(); ++ka) {
    auto it = b_cols.find(a.columns[ka]);
    if (it == b_cols.end()) continue;
    const std::size_t kb = it->second;
    std::vector<double> x, y;
    for (auto [ia, ib] : matched) {
      const auto& va = a.rows[ia].values[ka];
      const auto& vb = b.rows[ib].values[kb];
      if (va && vb) {
        x.push_back(*va);
        y.push_back(*vb);
      }
    }
    auto fit = fit_line(x, y);
    fit.feature = a.columns[ka];
    report.fits.push_back(std::move(fit));
  }
  if (report.fits.empty()) throw Error("tables share no feature columns");
  return report;
}

/// `fraction_r2_gt_<threshold>=<fraction>`
inline std::string summary_line(const CompareReport& report, double threshold) {
  return "fraction_r2_gt_" + format_double(threshold) + "=" +
         format_double(report.fraction_above(threshold));
}

/// Report CSV `feature,slope,intercept,r2,n`, followed by the summary line.
inline void write_compare_report(const CompareReport& report, double threshold,
                                 const std::filesystem::path& path) {
  std::string text = "feature,slope,intercept,r2,n\n";
  auto cell = [](const Value& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& f : report.fits) {
    detail::append_csv_field(text, f.feature);
    text += ',' + cell(f.slope) + ',' + cell(f.intercept) + ',' + cell(f.r2) + ',' +
            std::to_string(f.n) + '\n';
  }
  text += summary_line(report, threshold) + '\n';
  detail::write_file(path, text);
}

}  // namespace mprof
