#pragma once

// Seeded synthetic inputs shared by unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "mprof/core.hpp"

namespace oracle {

using mprof::Grid;
using mprof::ImagePlane;
using mprof::LabelMask;
using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Filled ellipse with semi-axes (a along its own x, b along its own y), rotated by theta.
inline bool in_ellipse(double r, double c, double cy, double cx, double a, double b, double theta) {
  const double dy = r - cy;
  const double dx = c - cx;
  const double u = dx * std::cos(theta) + dy * std::sin(theta);
  const double v = -dx * std::sin(theta) + dy * std::cos(theta);
  return (u * u) / (a * a) + (v * v) / (b * b) <= 1.0;
}

inline Grid<std::uint8_t> ellipse_mask(std::size_t h, std::size_t w, double cy, double cx, double a,
                                       double b, double theta) {
  Grid<std::uint8_t> g(h, w, 0);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c)
      if (in_ellipse(double(r), double(c), cy, cx, a, b, theta)) g(r, c) = 1;
  return g;
}

inline Grid<std::uint8_t> disk_mask(std::size_t h, std::size_t w, double cy, double cx,
                                    double radius) {
  return ellipse_mask(h, w, cy, cx, radius, radius, 0.0);
}

/// Union of a few random ellipses, sometimes with a punched hole; never empty.
inline Grid<std::uint8_t> random_blob(Rng& rng, std::size_t h, std::size_t w) {
  Grid<std::uint8_t> g(h, w, 0);
  const int parts = uniform_int(rng, 1, 4);
  const double scale = 0.5 * double(std::min(h, w));
  for (int k = 0; k < parts; ++k) {
    const double cy = uniform(rng, 0.25 * double(h), 0.75 * double(h));
    const double cx = uniform(rng, 0.25 * double(w), 0.75 * double(w));
    const double a = uniform(rng, 0.15, 0.7) * scale;
    const double b = uniform(rng, 0.15, 0.7) * scale;
    const double t = uniform(rng, 0.0, std::numbers::pi);
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t c = 0; c < w; ++c)
        if (in_ellipse(double(r), double(c), cy, cx, a, b, t)) g(r, c) = 1;
  }
  if (uniform(rng, 0.0, 1.0) < 0.3) {
    const double cy = uniform(rng, 0.3 * double(h), 0.7 * double(h));
    const double cx = uniform(rng, 0.3 * double(w), 0.7 * double(w));
    const double rad = uniform(rng, 1.0, 0.12 * scale + 1.0);
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t c = 0; c < w; ++c)
        if (in_ellipse(double(r), double(c), cy, cx, rad, rad, 0.0)) g(r, c) = 0;
  }
  if (std::none_of(g.pixels().begin(), g.pixels().end(), [](auto v) { return v != 0; }))
    g(h / 2, w / 2) = 1;
  return g;
}

/// Places a binary mask into a label mask of the given size at (row0, col0).
inline LabelMask place(const Grid<std::uint8_t>& local, std::size_t height, std::size_t width,
                       std::size_t row0, std::size_t col0, mprof::Label label = 1) {
  LabelMask m(height, width, 0);
  for (std::size_t r = 0; r < local.height(); ++r)
    for (std::size_t c = 0; c < local.width(); ++c)
      if (local(r, c)) m(row0 + r, col0 + c) = label;
  return m;
}

/// The single region of a binary mask, with a tight bounding box.
inline mprof::ObjectRegion region_of(const Grid<std::uint8_t>& local, std::size_t row0 = 0,
                                     std::size_t col0 = 0) {
  const auto m = place(local, local.height() + row0, local.width() + col0, row0, col0);
  return mprof::extract_objects(m).front();
}

/// Plane of independent uniform values, rounded to float so they survive RAWF32.
inline ImagePlane random_plane(Rng& rng, std::size_t h, std::size_t w, double lo = 0.0,
                               double hi = 1.0) {
  ImagePlane p(h, w, 0.0);
  for (auto& v : p.pixels()) v = static_cast<float>(uniform(rng, lo, hi));
  return p;
}

inline ImagePlane random_integer_plane(Rng& rng, std::size_t h, std::size_t w, int max_value) {
  ImagePlane p(h, w, 0.0);
  for (auto& v : p.pixels()) v = uniform_int(rng, 0, max_value);
  return p;
}

/// Rotation by 90 degrees counter-clockwise: (r, c) -> (w - 1 - c, r).
template <class T>
Grid<T> rotate90(const Grid<T>& g) {
  Grid<T> out(g.width(), g.height(), T{});
  for (std::size_t r = 0; r < g.height(); ++r)
    for (std::size_t c = 0; c < g.width(); ++c) out(g.width() - 1 - c, r) = g(r, c);
  return out;
}

/// Copy of `g` shifted by (dr, dc) into a canvas of the given size.
template <class T>
Grid<T> translate(const Grid<T>& g, std::size_t height, std::size_t width, std::size_t dr,
                  std::size_t dc) {
  Grid<T> out(height, width, T{});
  for (std::size_t r = 0; r < g.height(); ++r)
    for (std::size_t c = 0; c < g.width(); ++c) out(r + dr, c + dc) = g(r, c);
  return out;
}

/// Disk rasterized after rotating its centre (cy, cx) by `angle` about (py, px).
inline Grid<std::uint8_t> rotated_disk(std::size_t h, std::size_t w, double cy, double cx,
                                       double radius, double angle, double py, double px) {
  const double dy = cy - py, dx = cx - px;
  const double ry = py + std::cos(angle) * dy + std::sin(angle) * dx;
  const double rx = px - std::sin(angle) * dy + std::cos(angle) * dx;
  return disk_mask(h, w, ry, rx, radius);
}

struct Experiment {
  LabelMask mask;
  std::vector<ImagePlane> channels;
};

/// `objects` non-overlapping blobs on a jittered grid, labelled with
/// shuffled distinct labels, plus `n_channels` textured planes.
inline Experiment random_experiment(Rng& rng, std::size_t h, std::size_t w, std::size_t objects,
                                    std::size_t n_channels) {
  std::size_t cell = static_cast<std::size_t>(std::sqrt(double(h * w) / double(objects)));
  while (cell > 3 && (h / cell) * (w / cell) < objects) --cell;
  const std::size_t rows = h / cell, cols = w / cell;
  std::vector<std::size_t> slots(rows * cols);
  for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
  std::shuffle(slots.begin(), slots.end(), rng);
  slots.resize(std::min(objects, slots.size()));

  std::vector<mprof::Label> labels(slots.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<mprof::Label>(3 * i + 1);
  std::shuffle(labels.begin(), labels.end(), rng);

  Experiment e{LabelMask(h, w, 0), {}};
  const std::size_t blob = cell - 1;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const std::size_t r0 = (slots[k] / cols) * cell;
    const std::size_t c0 = (slots[k] % cols) * cell;
    const auto shape = random_blob(rng, blob, blob);
    for (std::size_t r = 0; r < blob; ++r)
      for (std::size_t c = 0; c < blob; ++c)
        if (shape(r, c)) e.mask(r0 + r, c0 + c) = labels[k];
  }
  for (std::size_t ch = 0; ch < n_channels; ++ch) {
    ImagePlane p(h, w, 0.0);
    const double fr = uniform(rng, 0.05, 0.5), fc = uniform(rng, 0.05, 0.5);
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t c = 0; c < w; ++c) {
        const double wave = 0.25 * (1.0 + std::sin(fr * double(r)) * std::cos(fc * double(c)));
        p(r, c) = static_cast<float>(wave + 0.5 * uniform(rng, 0.0, 1.0));
      }
    e.channels.push_back(std::move(p));
  }
  return e;
}

/// Relative comparison with a unit floor: |a - b| <= tol * max(1, |a|, |b|).
inline bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace oracle
