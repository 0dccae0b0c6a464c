// Command-line front end: extract, tessellate, normalize, compare, list-features.
//
// Exit codes: 0 success, 2 bad flags or invalid experiment definition,
// 1 any other failure. Diagnostics go to stderr.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mprof/mprof.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<std::string> default_names(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

void add_family_options(CLI::App* cmd, mprof::FamilyParams& p) {
  cmd->add_option("--texture-distance", p.texture.distance, "GLCM pixel offset")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--texture-gray-levels", p.texture.gray_levels, "Quantization levels")
      ->check(CLI::Range(2, 256))
      ->capture_default_str();
  cmd->add_option("--zernike-order", p.shape.zernike_max_order, "Highest Zernike order")
      ->check(CLI::Range(0, 20))
      ->capture_default_str();
  cmd->add_option("--radial-bins", p.radial.bins, "Number of radial bins")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--manders-threshold", p.coloc.manders_threshold_frac,
                  "Manders threshold as a fraction of the channel maximum")
      ->capture_default_str();
  cmd->add_option("--granularity-length", p.granularity.spectrum_length, "Spectrum length")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  cmd->add_option("--granularity-background-radius", p.granularity.background_radius,
                  "Disk radius of the background opening")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

/// Opens `<stem>_<object_set>.csv` for each table and streams rows into it.
class PerSetCsvSink final : public mprof::TableSink {
 public:
  explicit PerSetCsvSink(fs::path stem) : stem_(std::move(stem)) {}

  void begin_table(const std::string& object_set, const std::vector<std::string>& columns) override {
    fs::path path = stem_;
    path += "_" + object_set + ".csv";
    writer_ = std::make_unique<mprof::CsvTableWriter>(path);
    writer_->begin_table(object_set, columns);
  }
  void write_rows(std::span<const mprof::FeatureRow> rows) override { writer_->write_rows(rows); }
  void end_table() override {
    writer_->end_table();
    writer_.reset();
  }

 private:
  fs::path stem_;
  std::unique_ptr<mprof::CsvTableWriter> writer_;
};

struct ExtractArgs {
  std::vector<std::string> images;
  std::string channel_names;
  std::vector<std::string> masks;
  std::string mask_names;
  std::string features = "shape,intensity,texture,granularity,radial,coloc";
  mprof::FamilyParams params;
  std::size_t batch_size = 256;
  std::size_t workers = 1;
  std::string out;
};

int run_extract(const ExtractArgs& a) {
  const auto channel_names =
      a.channel_names.empty() ? default_names("Ch", a.images.size()) : split_list(a.channel_names);
  const auto mask_names =
      a.mask_names.empty() ? default_names("Objects", a.masks.size()) : split_list(a.mask_names);
  if (channel_names.size() != a.images.size())
    throw mprof::SpecError("--channel-names lists " + std::to_string(channel_names.size()) +
                           " names for " + std::to_string(a.images.size()) + " images");
  if (mask_names.size() != a.masks.size())
    throw mprof::SpecError("--mask-names lists " + std::to_string(mask_names.size()) +
                           " names for " + std::to_string(a.masks.size()) + " masks");

  mprof::ExperimentSpec spec;
  spec.families = mprof::parse_families(a.features);
  spec.params = a.params;
  spec.batch_size = a.batch_size;
  spec.workers = a.workers;

  // Check the definition before touching any file.
  {
    mprof::ExperimentSpec stub = spec;
    for (const auto& n : channel_names) stub.channels.push_back({n, mprof::ImagePlane(1, 1)});
    for (const auto& n : mask_names) stub.object_sets.push_back({n, mprof::LabelMask(1, 1)});
    mprof::validate(stub);
    mprof::plan(stub);
  }

  for (std::size_t i = 0; i < a.images.size(); ++i)
    spec.channels.push_back({channel_names[i], mprof::load_image(a.images[i])});
  for (std::size_t i = 0; i < a.masks.size(); ++i)
    spec.object_sets.push_back({mask_names[i], mprof::load_mask(a.masks[i])});

  fs::path stem = a.out;
  stem.replace_extension();
  PerSetCsvSink sink(stem);
  mprof::run(spec, sink);
  return 0;
}

struct TessellateArgs {
  std::optional<std::size_t> width;
  std::optional<std::size_t> height;
  double radius = 0.0;
  double min_coverage = 0.5;
  std::string tissue_mask;
  std::string out;
};

int run_tessellate(const TessellateArgs& a) {
  std::optional<mprof::LabelMask> tissue;
  if (!a.tissue_mask.empty()) tissue = mprof::load_mask(a.tissue_mask);
  mprof::HexGridParams p;
  p.radius = a.radius;
  p.min_coverage = a.min_coverage;
  if (a.width && a.height) {
    p.width = *a.width;
    p.height = *a.height;
  } else if (tissue) {
    p.width = a.width.value_or(tissue->width());
    p.height = a.height.value_or(tissue->height());
  } else {
    throw mprof::SpecError("--width and --height are required without --tissue-mask");
  }
  p.validate();
  auto mask = mprof::hex_tessellation(p);
  if (tissue) mask = mprof::filter_by_coverage(mask, *tissue, p.min_coverage);
  mprof::save_mask(mask, a.out, mprof::RasterFormat::RAWU32);
  return 0;
}

struct NormalizeArgs {
  std::string in;
  std::string out;
  mprof::NormalizeParams params;
};

int run_normalize(const NormalizeArgs& a) {
  a.params.validate();
  mprof::write_table(mprof::normalize(mprof::read_table(a.in), a.params), a.out);
  return 0;
}

struct CompareArgs {
  std::string a;
  std::string b;
  std::string out;
  double r2_threshold = 0.9;
};

int run_compare(const CompareArgs& c) {
  const auto report = mprof::compare_tables(mprof::read_table(c.a), mprof::read_table(c.b));
  mprof::write_compare_report(report, c.r2_threshold, c.out);
  std::cout << mprof::summary_line(report, c.r2_threshold) << '\n';
  return 0;
}

std::string family_params_text(mprof::Family f, const mprof::FamilyParams& p) {
  using mprof::Family;
  switch (f) {
    case Family::Shape: return "zernike_order=" + std::to_string(p.shape.zernike_max_order);
    case Family::Intensity: return "";
    case Family::Texture:
      return "distance=" + std::to_string(p.texture.distance) +
             ";gray_levels=" + std::to_string(p.texture.gray_levels);
    case Family::Granularity:
      return "length=" + std::to_string(p.granularity.spectrum_length) +
             ";background_radius=" + std::to_string(p.granularity.background_radius);
    case Family::Radial: return "bins=" + std::to_string(p.radial.bins);
    case Family::Coloc:
      return "manders_threshold=" + mprof::format_double(p.coloc.manders_threshold_frac);
  }
  return "";
}

struct ListArgs {
  std::string features = "shape,intensity,texture,granularity,radial,coloc";
  mprof::FamilyParams params;
};

int run_list_features(const ListArgs& a) {
  const auto families = mprof::parse_families(a.features);
  a.params.validate();
  std::string text = "name,family,input_kind,params\n";
  for (auto f : families) {
    std::vector<std::string> chans;
    if (mprof::input_kind(f) == 2) chans = {"<Channel>"};
    if (mprof::input_kind(f) == 3) chans = {"<ChannelA>", "<ChannelB>"};
    const auto params = family_params_text(f, a.params);
    for (const auto& key : mprof::family_catalog(f, a.params)) {
      mprof::detail::append_csv_field(text, mprof::feature_name("<ObjectSet>", f, key, chans));
      text += ',';
      text += mprof::family_token(f);
      text += ',' + std::to_string(mprof::input_kind(f)) + ',';
      mprof::detail::append_csv_field(text, params);
      text += '\n';
    }
  }
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-object feature extraction for image-based profiling"};
  app.require_subcommand(1);

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Measure every object and write feature tables");
  extract->add_option("--image", ex.images, "Channel image (repeatable)")->take_all();
  extract->add_option("--channel-names", ex.channel_names, "Comma-separated channel names");
  extract->add_option("--mask", ex.masks, "Label mask (repeatable)")->required()->take_all();
  extract->add_option("--mask-names", ex.mask_names, "Comma-separated object set names");
  extract->add_option("--features", ex.features, "Comma-separated feature families")
      ->capture_default_str();
  add_family_options(extract, ex.params);
  extract->add_option("--batch-size", ex.batch_size, "Objects per batch")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  extract->add_option("--workers", ex.workers, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  extract->add_option("--out", ex.out, "Output CSV; one file <stem>_<set>.csv per object set")
      ->required();

  TessellateArgs ts;
  auto* tessellate = app.add_subcommand("tessellate", "Generate a hexagonal label mask");
  tessellate->add_option("--width", ts.width, "Canvas width")->check(CLI::PositiveNumber);
  tessellate->add_option("--height", ts.height, "Canvas height")->check(CLI::PositiveNumber);
  tessellate->add_option("--radius", ts.radius, "Hexagon circumradius in pixels")->required();
  tessellate->add_option("--min-coverage", ts.min_coverage, "Minimum foreground fraction")
      ->capture_default_str();
  tessellate->add_option("--tissue-mask", ts.tissue_mask, "Foreground mask for coverage filtering");
  tessellate->add_option("--out", ts.out, "Output RAWU32 mask")->required();

  NormalizeArgs nm;
  auto* normalize = app.add_subcommand("normalize", "Robust z-score and correlation filter");
  normalize->add_option("--in", nm.in, "Input feature CSV")->required();
  normalize->add_option("--out", nm.out, "Output feature CSV")->required();
  normalize->add_option("--corr-threshold", nm.params.corr_threshold)->capture_default_str();
  normalize->add_option("--drop-missing-frac", nm.params.drop_missing_frac)->capture_default_str();

  CompareArgs cp;
  auto* compare = app.add_subcommand("compare", "Per-feature linear-fit R^2 between two tables");
  compare->add_option("--a", cp.a, "Reference feature CSV")->required();
  compare->add_option("--b", cp.b, "Compared feature CSV")->required();
  compare->add_option("--out", cp.out, "Report CSV")->required();
  compare->add_option("--r2-threshold", cp.r2_threshold)->capture_default_str();

  ListArgs ls;
  auto* list = app.add_subcommand("list-features", "Print the feature dictionary as CSV");
  list->add_option("--features", ls.features, "Comma-separated feature families")
      ->capture_default_str();
  add_family_options(list, ls.params);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*extract) return run_extract(ex);
    if (*tessellate) return run_tessellate(ts);
    if (*normalize) return run_normalize(nm);
    if (*compare) return run_compare(cp);
    if (*list) return run_list_features(ls);
  } catch (const mprof::SpecError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
