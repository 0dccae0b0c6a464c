#pragma once

// Shared data model: rasters, object regions, measurements and feature tables.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mprof {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raster sizes disagree, or an index falls outside a raster.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents (bad magic, truncated payload, bad CSV cell).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment definition or measurement parameters.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// Row-major 2D raster.
template <class T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;

  Grid(std::size_t height, std::size_t width, T fill = T{})
      : height_(height), width_(width), data_(checked_size(height, width), fill) {}

  Grid(std::size_t height, std::size_t width, std::vector<T> data)
      : height_(height), width_(width), data_(std::move(data)) {
    if (data_.size() != checked_size(height, width)) {
      throw DimensionError("grid payload has " + std::to_string(data_.size()) +
                           " samples, expected " + std::to_string(height * width));
    }
  }

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t row, std::size_t col) noexcept { return data_[row * width_ + col]; }
  const T& operator()(std::size_t row, std::size_t col) const noexcept {
    return data_[row * width_ + col];
  }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }

  bool same_shape(std::size_t height, std::size_t width) const noexcept {
    return height_ == height && width_ == width;
  }
  template <class U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return same_shape(other.height(), other.width());
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  static std::size_t checked_size(std::size_t height, std::size_t width) {
    if (height == 0 || width == 0) throw DimensionError("raster dimensions must be positive");
    return height * width;
  }

  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<T> data_;
};

/// One channel of real-valued intensities.
using ImagePlane = Grid<double>;

/// Object labels; 0 is background.
using LabelMask = Grid<std::uint32_t>;

using Label = std::uint32_t;

inline std::string shape_string(std::size_t height, std::size_t width) {
  return std::to_string(height) + "x" + std::to_string(width);
}

/// Inclusive bounding box in global coordinates.
struct BoundingBox {
  std::size_t row_min = 0;
  std::size_t col_min = 0;
  std::size_t row_max = 0;
  std::size_t col_max = 0;

  std::size_t height() const noexcept { return row_max - row_min + 1; }
  std::size_t width() const noexcept { return col_max - col_min + 1; }
  std::size_t area() const noexcept { return height() * width(); }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// A single object: its tight bounding box and a local boolean mask of that size.
struct ObjectRegion {
  Label label = 0;
  BoundingBox bbox;
  Grid<std::uint8_t> local_mask;
  std::size_t pixel_count = 0;

  std::size_t height() const noexcept { return bbox.height(); }
  std::size_t width() const noexcept { return bbox.width(); }

  bool contains(std::size_t local_row, std::size_t local_col) const noexcept {
    return local_mask(local_row, local_col) != 0;
  }

  /// Bounds-tolerant membership test in local coordinates.
  bool contains_signed(std::ptrdiff_t local_row, std::ptrdiff_t local_col) const noexcept {
    if (local_row < 0 || local_col < 0) return false;
    const auto r = static_cast<std::size_t>(local_row);
    const auto c = static_cast<std::size_t>(local_col);
    return r < height() && c < width() && local_mask(r, c) != 0;
  }

  /// Intensity of `plane` at a local coordinate.
  double sample(const ImagePlane& plane, std::size_t local_row, std::size_t local_col) const noexcept {
    return plane(bbox.row_min + local_row, bbox.col_min + local_col);
  }
};

/// Lightweight description of an object, enough to materialize its region later.
struct ObjectIndexEntry {
  Label label = 0;
  BoundingBox bbox;
  std::size_t pixel_count = 0;
};

/// A feature value; std::nullopt is the missing sentinel.
using Value = std::optional<double>;

/// Identifies a feature within a family: the feature token plus optional
/// parameter tokens that are placed after the channel names.
struct FeatureKey {
  std::string feature;
  std::string qualifier;

  friend bool operator==(const FeatureKey&, const FeatureKey&) = default;
};

struct Measurement {
  FeatureKey key;
  Value value;

  friend bool operator==(const Measurement&, const Measurement&) = default;
};

using Measurements = std::vector<Measurement>;

inline std::vector<FeatureKey> keys_of(const Measurements& ms) {
  std::vector<FeatureKey> keys;
  keys.reserve(ms.size());
  for (const auto& m : ms) keys.push_back(m.key);
  return keys;
}

struct FeatureRow {
  Label label = 0;
  std::vector<Value> values;

  friend bool operator==(const FeatureRow&, const FeatureRow&) = default;
};

/// Per-object feature matrix for one object set. Rows are sorted by label and
/// every row has one value per column.
struct FeatureTable {
  std::string object_set;
  std::vector<std::string> columns;
  std::vector<FeatureRow> rows;

  std::size_t column_index(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw Error("no column named '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
  }

  friend bool operator==(const FeatureTable&, const FeatureTable&) = default;
};

/// Receives a feature table incrementally: one begin_table, rows in label
/// order across any number of write_rows calls, then end_table.
class TableSink {
 public:
  virtual ~TableSink() = default;
  virtual void begin_table(const std::string& object_set, const std::vector<std::string>& columns) = 0;
  virtual void write_rows(std::span<const FeatureRow> rows) = 0;
  virtual void end_table() = 0;
};

/// Sink that keeps every table in memory.
class CollectingSink final : public TableSink {
 public:
  void begin_table(const std::string& object_set, const std::vector<std::string>& columns) override {
    tables_.push_back({object_set, columns, {}});
  }
  void write_rows(std::span<const FeatureRow> rows) override {
    tables_.back().rows.insert(tables_.back().rows.end(), rows.begin(), rows.end());
  }
  void end_table() override {}

  std::vector<FeatureTable> take() { return std::move(tables_); }

 private:
  std::vector<FeatureTable> tables_;
};

/// One pass over the mask: label, tight bbox and pixel count per label, sorted by label.
inline std::vector<ObjectIndexEntry> index_objects(const LabelMask& mask) {
  std::unordered_map<Label, std::size_t> slot;
  std::vector<ObjectIndexEntry> entries;
  for (std::size_t r = 0; r < mask.height(); ++r) {
    for (std::size_t c = 0; c < mask.width(); ++c) {
      const Label label = mask(r, c);
      if (label == 0) continue;
      auto [it, inserted] = slot.try_emplace(label, entries.size());
      if (inserted) {
        entries.push_back({label, {r, c, r, c}, 0});
      }
      auto& e = entries[it->second];
      e.bbox.row_min = std::min(e.bbox.row_min, r);
      e.bbox.row_max = std::max(e.bbox.row_max, r);
      e.bbox.col_min = std::min(e.bbox.col_min, c);
      e.bbox.col_max = std::max(e.bbox.col_max, c);
      ++e.pixel_count;
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const ObjectIndexEntry& a, const ObjectIndexEntry& b) { return a.label < b.label; });
  return entries;
}

inline ObjectRegion make_region(const LabelMask& mask, const ObjectIndexEntry& entry) {
  ObjectRegion region;
  region.label = entry.label;
  region.bbox = entry.bbox;
  region.pixel_count = entry.pixel_count;
  region.local_mask = Grid<std::uint8_t>(entry.bbox.height(), entry.bbox.width(), 0);
  for (std::size_t r = 0; r < entry.bbox.height(); ++r) {
    for (std::size_t c = 0; c < entry.bbox.width(); ++c) {
      if (mask(entry.bbox.row_min + r, entry.bbox.col_min + c) == entry.label) {
        region.local_mask(r, c) = 1;
      }
    }
  }
  return region;
}

/// One region per distinct nonzero label, ascending. Pixels sharing a label
/// form one object even when they are not connected.
inline std::vector<ObjectRegion> extract_objects(const LabelMask& mask) {
  std::vector<ObjectRegion> regions;
  for (const auto& entry : index_objects(mask)) regions.push_back(make_region(mask, entry));
  return regions;
}

/// Per-pixel maximum over a z-stack.
inline ImagePlane max_project(std::span<const ImagePlane> stack) {
  if (stack.empty()) throw DimensionError("cannot project an empty stack");
  ImagePlane out = stack.front();
  for (std::size_t i = 1; i < stack.size(); ++i) {
    const auto& plane = stack[i];
    if (!plane.same_shape(out)) {
      throw DimensionError("stack plane " + std::to_string(i) + " is " +
                           shape_string(plane.height(), plane.width()) + ", expected " +
                           shape_string(out.height(), out.width()));
    }
    auto dst = out.pixels();
    auto src = plane.pixels();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = std::max(dst[k], src[k]);
  }
  return out;
}

inline void check_aligned(const LabelMask& mask, std::span<const ImagePlane> planes) {
  for (std::size_t i = 0; i < planes.size(); ++i) {
    if (!planes[i].same_shape(mask)) {
      throw DimensionError("plane " + std::to_string(i) + " is " +
                           shape_string(planes[i].height(), planes[i].width()) +
                           ", mask is " + shape_string(mask.height(), mask.width()));
    }
  }
}

}  // namespace mprof
