#pragma once

// Plans and executes the measurement matrix over object sets x channels x
// channel pairs. Objects are processed in label-ordered batches; each object
// row is computed independently, so results do not depend on the batch size
// or the number of workers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mprof/coloc.hpp"
#include "mprof/core.hpp"
#include "mprof/detail/worker_pool.hpp"
#include "mprof/granularity.hpp"
#include "mprof/intensity.hpp"
#include "mprof/radial.hpp"
#include "mprof/shape.hpp"
#include "mprof/texture.hpp"

namespace mprof {

/// Measurement families in canonical order.
enum class Family { Shape, Intensity, Texture, Granularity, Radial, Coloc };

inline constexpr std::array<Family, 6> kAllFamilies = {Family::Shape,       Family::Intensity,
                                                      Family::Texture,     Family::Granularity,
                                                      Family::Radial,      Family::Coloc};

/// Lower-case token used on the command line.
inline std::string_view family_token(Family f) {
  switch (f) {
    case Family::Shape: return "shape";
    case Family::Intensity: return "intensity";
    case Family::Texture: return "texture";
    case Family::Granularity: return "granularity";
    case Family::Radial: return "radial";
    case Family::Coloc: return "coloc";
  }
  return "";
}

/// Family segment of feature names.
inline std::string_view family_prefix(Family f) {
  switch (f) {
    case Family::Shape: return "Shape";
    case Family::Intensity: return "Intensity";
    case Family::Texture: return "Texture";
    case Family::Granularity: return "Granularity";
    case Family::Radial: return "RadialDistribution";
    case Family::Coloc: return "Coloc";
  }
  return "";
}

/// 1: object only, 2: object + one channel, 3: object + channel pair.
inline int input_kind(Family f) {
  switch (f) {
    case Family::Shape: return 1;
    case Family::Coloc: return 3;
    default: return 2;
  }
}

inline Family parse_family(std::string_view token) {
  for (Family f : kAllFamilies)
    if (family_token(f) == token) return f;
  throw SpecError("unknown feature family '" + std::string(token) + "'");
}

/// Parses a comma-separated family list into canonical order without duplicates.
inline std::vector<Family> parse_families(std::string_view list) {
  std::set<Family> seen;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t comma = std::min(list.find(',', pos), list.size());
    const auto token = list.substr(pos, comma - pos);
    if (!token.empty()) seen.insert(parse_family(token));
    pos = comma + 1;
  }
  if (seen.empty()) throw SpecError("no feature families requested");
  return {seen.begin(), seen.end()};
}

struct FamilyParams {
  ShapeParams shape;
  TextureParams texture;
  GranularityParams granularity;
  RadialParams radial;
  ColocParams coloc;

  void validate() const {
    shape.validate();
    texture.validate();
    granularity.validate();
    radial.validate();
    coloc.validate();
  }
};

/// Feature keys a family emits for one (object, channel[, channel]) task.
inline std::vector<FeatureKey> family_catalog(Family f, const FamilyParams& p) {
  switch (f) {
    case Family::Shape: return shape_catalog(p.shape);
    case Family::Intensity: return intensity_catalog();
    case Family::Texture: return texture_catalog(p.texture);
    case Family::Granularity: return granularity_catalog(p.granularity);
    case Family::Radial: return radial_catalog(p.radial);
    case Family::Coloc: return coloc_catalog();
  }
  return {};
}

struct NamedPlane {
  std::string name;
  ImagePlane plane;
};

struct NamedMask {
  std::string name;
  LabelMask mask;
};

struct ExperimentSpec {
  std::vector<NamedPlane> channels;
  std::vector<NamedMask> object_sets;
  std::vector<Family> families = {kAllFamilies.begin(), kAllFamilies.end()};
  FamilyParams params;
  std::size_t batch_size = 256;
  std::size_t workers = 1;
};

struct Task {
  std::size_t object_set = 0;
  Family family = Family::Shape;
  std::optional<std::size_t> channel;
  std::optional<std::pair<std::size_t, std::size_t>> channel_pair;

  friend bool operator==(const Task&, const Task&) = default;
};

using TaskPlan = std::vector<Task>;

inline bool valid_name(std::string_view name) {
  auto alpha = [](char ch) { return (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z'); };
  auto digit = [](char ch) { return ch >= '0' && ch <= '9'; };
  if (name.empty() || !alpha(name.front())) return false;
  return std::all_of(name.begin(), name.end(), [&](char ch) { return alpha(ch) || digit(ch); });
}

/// `<ObjectSet>_<Family>_<Feature>[_<Chan>[_<Chan2>]][_<qualifier>]`.
inline std::string feature_name(std::string_view object_set, Family family, const FeatureKey& key,
                                std::span<const std::string> channels = {}) {
  std::string out;
  if (!object_set.empty()) {
    out += object_set;
    out += '_';
  }
  out += family_prefix(family);
  out += '_';
  out += key.feature;
  for (const auto& ch : channels) {
    out += '_';
    out += ch;
  }
  if (!key.qualifier.empty()) {
    out += '_';
    out += key.qualifier;
  }
  return out;
}

/// Canonical task list; fails when a family lacks the channels it needs.
inline TaskPlan plan(const ExperimentSpec& spec) {
  std::vector<Family> families = spec.families;
  std::sort(families.begin(), families.end());
  families.erase(std::unique(families.begin(), families.end()), families.end());

  const std::size_t n_channels = spec.channels.size();
  for (Family f : families) {
    if (input_kind(f) == 2 && n_channels == 0)
      throw SpecError("family '" + std::string(family_token(f)) + "' needs at least one channel");
    if (input_kind(f) == 3 && n_channels < 2)
      throw SpecError("coloc needs at least two channels to form a pair, got " +
                      std::to_string(n_channels));
  }

  TaskPlan tasks;
  for (std::size_t s = 0; s < spec.object_sets.size(); ++s) {
    for (Family f : families) {
      switch (input_kind(f)) {
        case 1:
          tasks.push_back({s, f, std::nullopt, std::nullopt});
          break;
        case 2:
          for (std::size_t c = 0; c < n_channels; ++c) tasks.push_back({s, f, c, std::nullopt});
          break;
        default:
          for (std::size_t a = 0; a < n_channels; ++a)
            for (std::size_t b = a + 1; b < n_channels; ++b)
              tasks.push_back({s, f, std::nullopt, std::make_pair(a, b)});
      }
    }
  }
  return tasks;
}

inline void validate(const ExperimentSpec& spec) {
  auto check_names = [](const auto& items, const char* what) {
    std::set<std::string> seen;
    for (const auto& item : items) {
      if (!valid_name(item.name))
        throw SpecError(std::string(what) + " name '" + item.name +
                        "' must match [A-Za-z][A-Za-z0-9]*");
      if (!seen.insert(item.name).second)
        throw SpecError(std::string("duplicate ") + what + " name '" + item.name + "'");
    }
  };
  check_names(spec.channels, "channel");
  check_names(spec.object_sets, "object set");
  if (spec.batch_size == 0) throw SpecError("batch size must be >= 1");
  if (spec.workers == 0) throw SpecError("worker count must be >= 1");
  spec.params.validate();

  for (const auto& set : spec.object_sets) {
    for (std::size_t i = 0; i < spec.channels.size(); ++i) {
      const auto& plane = spec.channels[i].plane;
      if (!plane.same_shape(set.mask))
        throw DimensionError("channel '" + spec.channels[i].name + "' is " +
                             shape_string(plane.height(), plane.width()) + " but object set '" +
                             set.name + "' is " +
                             shape_string(set.mask.height(), set.mask.width()));
    }
    if (!set.mask.same_shape(spec.object_sets.front().mask))
      throw DimensionError("object set '" + set.name + "' differs in size from '" +
                           spec.object_sets.front().name + "'");
  }
  for (const auto& ch : spec.channels)
    for (double v : ch.plane.pixels())
      if (!std::isfinite(v)) throw SpecError("channel '" + ch.name + "' has non-finite pixels");
}

/// Ordered column names of one object set's table.
inline std::vector<std::string> table_columns(const ExperimentSpec& spec, const TaskPlan& tasks,
                                              std::size_t object_set) {
  std::vector<std::string> columns;
  const auto& set_name = spec.object_sets[object_set].name;
  for (const auto& t : tasks) {
    if (t.object_set != object_set) continue;
    std::vector<std::string> chans;
    if (t.channel) chans.push_back(spec.channels[*t.channel].name);
    if (t.channel_pair) {
      chans.push_back(spec.channels[t.channel_pair->first].name);
      chans.push_back(spec.channels[t.channel_pair->second].name);
    }
    for (const auto& key : family_catalog(t.family, spec.params))
      columns.push_back(feature_name(set_name, t.family, key, chans));
  }
  return columns;
}

/// Runs one task against one object.
inline Measurements measure_task(const ExperimentSpec& spec, const Task& t,
                                 const ObjectRegion& region) {
  const auto& p = spec.params;
  auto plane = [&](std::size_t i) -> const ImagePlane& { return spec.channels[i].plane; };
  switch (t.family) {
    case Family::Shape: return measure_shape(region, p.shape);
    case Family::Intensity: return measure_intensity(region, plane(*t.channel));
    case Family::Texture: return measure_texture(region, plane(*t.channel), p.texture);
    case Family::Granularity: return measure_granularity(region, plane(*t.channel), p.granularity);
    case Family::Radial: return measure_radial(region, plane(*t.channel), p.radial);
    case Family::Coloc:
      return measure_coloc(region, plane(t.channel_pair->first), plane(t.channel_pair->second),
                           p.coloc);
  }
  return {};
}

/// Computes the full row of one object; non-finite results become missing.
inline FeatureRow measure_object(const ExperimentSpec& spec, const TaskPlan& tasks,
                                 std::size_t object_set, const ObjectRegion& region) {
  FeatureRow row;
  row.label = region.label;
  for (const auto& t : tasks) {
    if (t.object_set != object_set) continue;
    for (auto& m : measure_task(spec, t, region)) {
      if (m.value && !std::isfinite(*m.value)) m.value.reset();
      row.values.push_back(m.value);
    }
  }
  return row;
}

/// Streams one table per object set into `sink`, batch by batch.
inline void run(const ExperimentSpec& spec, TableSink& sink) {
  validate(spec);
  const auto tasks = plan(spec);
  detail::WorkerPool pool(spec.workers);
  std::vector<FeatureRow> rows;
  for (std::size_t s = 0; s < spec.object_sets.size(); ++s) {
    const auto& mask = spec.object_sets[s].mask;
    const auto columns = table_columns(spec, tasks, s);
    const auto index = index_objects(mask);
    sink.begin_table(spec.object_sets[s].name, columns);
    for (std::size_t start = 0; start < index.size(); start += spec.batch_size) {
      const std::size_t count = std::min(spec.batch_size, index.size() - start);
      rows.assign(count, FeatureRow{});
      pool.parallel_for(count, [&](std::size_t i) {
        rows[i] = measure_object(spec, tasks, s, make_region(mask, index[start + i]));
      });
      for (const auto& row : rows)
        if (row.values.size() != columns.size())
          throw Error("internal: row width " + std::to_string(row.values.size()) +
                      " does not match " + std::to_string(columns.size()) + " columns");
      sink.write_rows(rows);
    }
    sink.end_table();
  }
}

/// In-memory variant: one table per object set, in declaration order.
inline std::vector<FeatureTable> run(const ExperimentSpec& spec) {
  CollectingSink sink;
  run(spec, sink);
  return sink.take();
}

}  // namespace mprof
