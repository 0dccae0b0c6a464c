#pragma once

// Grayscale morphology restricted to an object's pixels. Pixels outside the
// object never contribute: they act as +inf for erosion and -inf for dilation.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <limits>
#include <vector>

#include "mprof/core.hpp"

namespace mprof::detail {

/// Horizontal run of a disk structuring element: row offset dr, columns [-half, half].
struct DiskRun {
  std::ptrdiff_t dr;
  std::ptrdiff_t half;
};

/// Discrete disk {(dr,dc): dr^2 + dc^2 <= radius^2} as one run per row.
inline std::vector<DiskRun> disk_runs(int radius) {
  std::vector<DiskRun> runs;
  const std::ptrdiff_t r = radius;
  for (std::ptrdiff_t dr = -r; dr <= r; ++dr) {
    std::ptrdiff_t half = 0;
    while ((half + 1) * (half + 1) + dr * dr <= r * r) ++half;
    runs.push_back({dr, half});
  }
  return runs;
}

template <bool Erode>
Grid<double> rank_filter(const Grid<double>& img, const Grid<std::uint8_t>& mask, int radius) {
  const auto h = static_cast<std::ptrdiff_t>(img.height());
  const auto w = static_cast<std::ptrdiff_t>(img.width());
  const auto runs = disk_runs(radius);
  Grid<double> out = img;
  for (std::ptrdiff_t r = 0; r < h; ++r) {
    for (std::ptrdiff_t c = 0; c < w; ++c) {
      if (!mask(r, c)) continue;
      double best = img(r, c);
      for (const auto& run : runs) {
        const std::ptrdiff_t rr = r + run.dr;
        if (rr < 0 || rr >= h) continue;
        const std::ptrdiff_t c0 = std::max<std::ptrdiff_t>(0, c - run.half);
        const std::ptrdiff_t c1 = std::min<std::ptrdiff_t>(w - 1, c + run.half);
        for (std::ptrdiff_t cc = c0; cc <= c1; ++cc) {
          if (!mask(rr, cc)) continue;
          const double v = img(rr, cc);
          if constexpr (Erode) {
            if (v < best) best = v;
          } else {
            if (v > best) best = v;
          }
        }
      }
      out(r, c) = best;
    }
  }
  return out;
}

inline Grid<double> erode(const Grid<double>& img, const Grid<std::uint8_t>& mask, int radius) {
  return rank_filter<true>(img, mask, radius);
}

inline Grid<double> dilate(const Grid<double>& img, const Grid<std::uint8_t>& mask, int radius) {
  return rank_filter<false>(img, mask, radius);
}

/// Erosion followed by dilation with the same disk.
inline Grid<double> open(const Grid<double>& img, const Grid<std::uint8_t>& mask, int radius) {
  return dilate(erode(img, mask, radius), mask, radius);
}

/// Reconstruction by dilation with 8-connectivity: the fixpoint of
/// marker <- min(dilate3x3(marker), limit), computed with two raster
/// sweeps followed by a FIFO propagation. Requires marker <= limit.
inline Grid<double> reconstruct(Grid<double> marker, const Grid<double>& limit,
                                const Grid<std::uint8_t>& mask) {
  const auto h = static_cast<std::ptrdiff_t>(marker.height());
  const auto w = static_cast<std::ptrdiff_t>(marker.width());
  auto inside = [&](std::ptrdiff_t r, std::ptrdiff_t c) {
    return r >= 0 && c >= 0 && r < h && c < w && mask(r, c) != 0;
  };
  // Causal (already visited) neighbours for the forward sweep; negate for backward.
  constexpr std::ptrdiff_t causal[4][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}};

  for (std::ptrdiff_t r = 0; r < h; ++r) {
    for (std::ptrdiff_t c = 0; c < w; ++c) {
      if (!mask(r, c)) continue;
      double m = marker(r, c);
      for (const auto& o : causal)
        if (inside(r + o[0], c + o[1])) m = std::max(m, marker(r + o[0], c + o[1]));
      marker(r, c) = std::min(m, limit(r, c));
    }
  }

  std::deque<std::pair<std::ptrdiff_t, std::ptrdiff_t>> fifo;
  for (std::ptrdiff_t r = h - 1; r >= 0; --r) {
    for (std::ptrdiff_t c = w - 1; c >= 0; --c) {
      if (!mask(r, c)) continue;
      double m = marker(r, c);
      for (const auto& o : causal)
        if (inside(r - o[0], c - o[1])) m = std::max(m, marker(r - o[0], c - o[1]));
      marker(r, c) = std::min(m, limit(r, c));
      for (const auto& o : causal) {
        const std::ptrdiff_t rr = r - o[0];
        const std::ptrdiff_t cc = c - o[1];
        if (inside(rr, cc) && marker(rr, cc) < marker(r, c) && marker(rr, cc) < limit(rr, cc)) {
          fifo.emplace_back(r, c);
          break;
        }
      }
    }
  }

  while (!fifo.empty()) {
    const auto [r, c] = fifo.front();
    fifo.pop_front();
    for (std::ptrdiff_t dr = -1; dr <= 1; ++dr) {
      for (std::ptrdiff_t dc = -1; dc <= 1; ++dc) {
        if ((dr == 0 && dc == 0) || !inside(r + dr, c + dc)) continue;
        const std::ptrdiff_t rr = r + dr;
        const std::ptrdiff_t cc = c + dc;
        if (marker(rr, cc) < marker(r, c) && marker(rr, cc) != limit(rr, cc)) {
          marker(rr, cc) = std::min(marker(r, c), limit(rr, cc));
          fifo.emplace_back(rr, cc);
        }
      }
    }
  }
  return marker;
}

}  // namespace mprof::detail
