#pragma once

// Pointy-top hexagonal lattice masks, usable as an ordinary object set.

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <map>
#include <numbers>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mprof/core.hpp"

namespace mprof {

struct HexGridParams {
  std::size_t width = 0;
  std::size_t height = 0;
  double radius = 0.0;  // circumradius in pixels
  double min_coverage = 0.5;

  void validate() const {
    if (width == 0 || height == 0) throw SpecError("tessellation canvas must be non-empty");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw SpecError("hexagon radius must be > 0");
    if (!(min_coverage >= 0.0 && min_coverage <= 1.0))
      throw SpecError("minimum coverage must be in [0, 1]");
  }
};

/// Lattice coordinates of a hexagon: column index i, row index j.
struct HexCell {
  std::int64_t i = 0;
  std::int64_t j = 0;

  friend auto operator<=>(const HexCell& a, const HexCell& b) {
    return std::pair(a.j, a.i) <=> std::pair(b.j, b.i);
  }
  friend bool operator==(const HexCell&, const HexCell&) = default;
};

/// Centre of a lattice cell as (row, col). Odd lattice rows shift right by half a cell.
inline std::pair<double, double> hex_center(const HexCell& cell, double radius) {
  const double parity = static_cast<double>(((cell.j % 2) + 2) % 2);
  return {1.5 * radius * static_cast<double>(cell.j),
          std::numbers::sqrt3 * radius * (static_cast<double>(cell.i) + 0.5 * parity)};
}

/// Hexagonal norm of an offset, scaled so the hexagon boundary is at 1.
inline double hex_distance(double d_row, double d_col, double radius) {
  const double ax = std::abs(d_col);
  const double ay = std::abs(d_row);
  return std::max(ax * (2.0 / std::numbers::sqrt3), ax / std::numbers::sqrt3 + ay) / radius;
}

/// Lattice cell owning pixel (row, col); exact ties go to the earlier cell in (j, i) order.
inline HexCell hex_owner(double row, double col, double radius) {
  const double row_step = 1.5 * radius;
  const double col_step = std::numbers::sqrt3 * radius;
  const auto j_lo = static_cast<std::int64_t>(std::floor((row - radius) / row_step));
  const auto j_hi = static_cast<std::int64_t>(std::ceil((row + radius) / row_step));
  HexCell best{};
  double best_d = std::numeric_limits<double>::infinity();
  for (std::int64_t j = j_lo; j <= j_hi; ++j) {
    const double shift = 0.5 * static_cast<double>(((j % 2) + 2) % 2);
    const auto i_lo = static_cast<std::int64_t>(std::floor(col / col_step - shift - 1.0));
    const auto i_hi = static_cast<std::int64_t>(std::ceil(col / col_step - shift + 1.0));
    for (std::int64_t i = i_lo; i <= i_hi; ++i) {
      const HexCell cell{i, j};
      const auto [cr, cc] = hex_center(cell, radius);
      const double d = hex_distance(row - cr, col - cc, radius);
      if (d < best_d || (d == best_d && cell < best)) {
        best = cell;
        best_d = d;
      }
    }
  }
  return best;
}

/// Labels every pixel with its hexagon. Labels are dense from 1 in (j, i)
/// lattice order over the hexagons that own at least one pixel.
inline LabelMask hex_tessellation(const HexGridParams& params) {
  params.validate();
  std::vector<HexCell> owner(params.width * params.height);
  std::map<HexCell, Label> labels;
  for (std::size_t r = 0; r < params.height; ++r)
    for (std::size_t c = 0; c < params.width; ++c) {
      const auto cell = hex_owner(static_cast<double>(r), static_cast<double>(c), params.radius);
      owner[r * params.width + c] = cell;
      labels.emplace(cell, 0);
    }
  Label next = 1;
  for (auto& [cell, label] : labels) label = next++;

  LabelMask mask(params.height, params.width, 0);
  auto px = mask.pixels();
  for (std::size_t k = 0; k < owner.size(); ++k) px[k] = labels.at(owner[k]);
  return mask;
}

/// Zeroes every hexagon whose foreground fraction is below `min_coverage`;
/// survivors keep their labels. Any nonzero foreground pixel counts.
inline LabelMask filter_by_coverage(const LabelMask& hex_mask, const LabelMask& foreground,
                                    double min_coverage) {
  if (!hex_mask.same_shape(foreground))
    throw DimensionError("foreground is " + shape_string(foreground.height(), foreground.width()) +
                         ", hexagon mask is " +
                         shape_string(hex_mask.height(), hex_mask.width()));
  struct Tally {
    std::size_t total = 0;
    std::size_t covered = 0;
  };
  std::unordered_map<Label, Tally> tally;
  const auto labels = hex_mask.pixels();
  const auto fg = foreground.pixels();
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k] == 0) continue;
    auto& t = tally[labels[k]];
    ++t.total;
    if (fg[k] != 0) ++t.covered;
  }
  LabelMask out = hex_mask;
  for (auto& v : out.pixels()) {
    if (v == 0) continue;
    const auto& t = tally[v];
    if (static_cast<double>(t.covered) / static_cast<double>(t.total) < min_coverage) v = 0;
  }
  return out;
}

}  // namespace mprof
