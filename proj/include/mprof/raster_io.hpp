#pragma once

// Rasters: binary PGM (P5, 8 or 16 bit) and two raw formats with a one-line
// text header, `MPROF F32 <w> <h>\n` / `MPROF U32 <w> <h>\n`, followed by
// little-endian samples. Tables: RFC-4180 CSV with shortest round-trip floats.

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mprof/core.hpp"

namespace mprof {

enum class RasterFormat { PGM8, PGM16, RAWF32, RAWU32 };

struct RasterHeader {
  RasterFormat format = RasterFormat::PGM8;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t payload_offset = 0;

  std::size_t sample_bytes() const {
    switch (format) {
      case RasterFormat::PGM8: return 1;
      case RasterFormat::PGM16: return 2;
      default: return 4;
    }
  }
};

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

class HeaderScanner {
 public:
  explicit HeaderScanner(std::string_view bytes) : bytes_(bytes) {}

  /// Next whitespace-delimited token; PGM comments are skipped.
  std::string_view token() {
    while (pos_ < bytes_.size()) {
      const char ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
        ++pos_;
      } else {
        break;
      }
    }
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (start == pos_) throw FormatError("truncated raster header");
    return bytes_.substr(start, pos_ - start);
  }

  std::size_t number() {
    const auto tok = token();
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
      throw FormatError("bad number '" + std::string(tok) + "' in raster header");
    return v;
  }

  /// Consumes exactly one whitespace byte terminating the header.
  std::size_t end_of_header() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
      throw FormatError("raster header is not terminated by whitespace");
    return pos_ + 1;
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

inline std::uint32_t load_le32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

inline void store_le32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

}  // namespace detail

inline RasterHeader parse_raster_header(std::string_view bytes) {
  detail::HeaderScanner scan(bytes);
  RasterHeader h;
  const auto magic = scan.token();
  if (magic == "P5") {
    h.width = scan.number();
    h.height = scan.number();
    const std::size_t maxval = scan.number();
    if (maxval == 0 || maxval > 65535) throw FormatError("PGM maxval out of range");
    h.format = maxval < 256 ? RasterFormat::PGM8 : RasterFormat::PGM16;
  } else if (magic == "MPROF") {
    const auto kind = scan.token();
    if (kind == "F32") {
      h.format = RasterFormat::RAWF32;
    } else if (kind == "U32") {
      h.format = RasterFormat::RAWU32;
    } else {
      throw FormatError("unknown raw raster kind '" + std::string(kind) + "'");
    }
    h.width = scan.number();
    h.height = scan.number();
  } else {
    throw FormatError("unrecognized raster magic '" + std::string(magic) + "'");
  }
  if (h.width == 0 || h.height == 0) throw FormatError("raster dimensions must be positive");
  h.payload_offset = scan.end_of_header();
  const std::size_t need = h.width * h.height * h.sample_bytes();
  if (bytes.size() - h.payload_offset < need)
    throw FormatError("truncated raster payload: need " + std::to_string(need) + " bytes, have " +
                      std::to_string(bytes.size() - h.payload_offset));
  return h;
}

namespace detail {

/// Raw integer samples of a PGM or RAWU32 raster.
inline std::vector<std::uint32_t> integer_samples(std::string_view bytes, const RasterHeader& h) {
  const std::size_t n = h.width * h.height;
  std::vector<std::uint32_t> out(n);
  const char* p = bytes.data() + h.payload_offset;
  for (std::size_t i = 0; i < n; ++i) {
    switch (h.format) {
      case RasterFormat::PGM8: out[i] = static_cast<unsigned char>(p[i]); break;
      case RasterFormat::PGM16:
        out[i] = (static_cast<std::uint32_t>(static_cast<unsigned char>(p[2 * i])) << 8) |
                 static_cast<unsigned char>(p[2 * i + 1]);
        break;
      case RasterFormat::RAWU32: out[i] = load_le32(p + 4 * i); break;
      case RasterFormat::RAWF32: throw FormatError("float raster where integers were expected");
    }
  }
  return out;
}

}  // namespace detail

/// Loads an intensity image. Integer samples are scaled to [0, 1] by the
/// maximum of their storage type (255 or 65535).
inline ImagePlane load_image(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  const auto h = parse_raster_header(bytes);
  std::vector<double> px(h.width * h.height);
  if (h.format == RasterFormat::RAWF32) {
    const char* p = bytes.data() + h.payload_offset;
    for (std::size_t i = 0; i < px.size(); ++i) {
      const float f = std::bit_cast<float>(detail::load_le32(p + 4 * i));
      if (!std::isfinite(f)) throw FormatError("non-finite sample in '" + path.string() + "'");
      px[i] = f;
    }
  } else if (h.format == RasterFormat::RAWU32) {
    throw FormatError("'" + path.string() + "' is a label raster, not an image");
  } else {
    const double scale = h.format == RasterFormat::PGM8 ? 255.0 : 65535.0;
    const auto raw = detail::integer_samples(bytes, h);
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = raw[i] / scale;
  }
  return ImagePlane(h.height, h.width, std::move(px));
}

/// Loads a label mask; samples are used verbatim as labels.
inline LabelMask load_mask(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  const auto h = parse_raster_header(bytes);
  if (h.format == RasterFormat::RAWF32)
    throw FormatError("'" + path.string() + "' is a float raster, not a label mask");
  return LabelMask(h.height, h.width, detail::integer_samples(bytes, h));
}

/// Saves an image. Float output stores single precision; PGM output rounds
/// values clamped to [0, 1] onto the integer range.
inline void save_image(const ImagePlane& plane, const std::filesystem::path& path,
                       RasterFormat format = RasterFormat::RAWF32) {
  std::string out;
  const auto w = std::to_string(plane.width());
  const auto h = std::to_string(plane.height());
  switch (format) {
    case RasterFormat::RAWF32:
      out = "MPROF F32 " + w + " " + h + "\n";
      for (double v : plane.pixels()) {
        if (!std::isfinite(v)) throw FormatError("cannot save non-finite pixel");
        detail::store_le32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
      }
      break;
    case RasterFormat::PGM8:
    case RasterFormat::PGM16: {
      const bool wide = format == RasterFormat::PGM16;
      const double scale = wide ? 65535.0 : 255.0;
      out = "P5\n" + w + " " + h + "\n" + (wide ? "65535" : "255") + "\n";
      for (double v : plane.pixels()) {
        const auto s = static_cast<std::uint32_t>(std::lround(std::clamp(v, 0.0, 1.0) * scale));
        if (wide) out.push_back(static_cast<char>(s >> 8));
        out.push_back(static_cast<char>(s & 0xFFu));
      }
      break;
    }
    case RasterFormat::RAWU32: throw FormatError("RAWU32 is a label format");
  }
  detail::write_file(path, out);
}

/// Saves a label mask as PGM16 (labels must fit in 16 bits) or RAWU32.
inline void save_mask(const LabelMask& mask, const std::filesystem::path& path,
                      RasterFormat format = RasterFormat::RAWU32) {
  std::string out;
  const auto w = std::to_string(mask.width());
  const auto h = std::to_string(mask.height());
  if (format == RasterFormat::RAWU32) {
    out = "MPROF U32 " + w + " " + h + "\n";
    for (auto v : mask.pixels()) detail::store_le32(out, v);
  } else if (format == RasterFormat::PGM16) {
    out = "P5\n" + w + " " + h + "\n65535\n";
    for (auto v : mask.pixels()) {
      if (v > 65535) throw FormatError("label " + std::to_string(v) + " does not fit in PGM16");
      out.push_back(static_cast<char>(v >> 8));
      out.push_back(static_cast<char>(v & 0xFFu));
    }
  } else {
    throw FormatError("label masks are saved as PGM16 or RAWU32");
  }
  detail::write_file(path, out);
}

// ---------------------------------------------------------------------------
// CSV

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error("cannot format number");
  return {buf, ptr};
}

namespace detail {

inline void append_csv_field(std::string& line, std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    line += field;
    return;
  }
  line += '"';
  for (char ch : field) {
    if (ch == '"') line += '"';
    line += ch;
  }
  line += '"';
}

/// Splits CSV text into records of fields (RFC 4180 quoting).
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"' && field.empty()) {
      quoted = true;
      field_started = true;
    } else if (ch == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      field_started = false;
    } else {
      field += ch;
      field_started = true;
    }
  }
  if (quoted) throw FormatError("unterminated quoted CSV field");
  if (field_started || !field.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace detail

/// Streams a table to CSV: `object_set,label,<columns...>`; missing cells are empty.
class CsvTableWriter final : public TableSink {
 public:
  explicit CsvTableWriter(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error("cannot open '" + path.string() + "' for writing");
  }

  void begin_table(const std::string& object_set, const std::vector<std::string>& columns) override {
    object_set_ = object_set;
    std::string line = "object_set,label";
    for (const auto& c : columns) {
      line += ',';
      detail::append_csv_field(line, c);
    }
    line += '\n';
    emit(line);
  }

  void write_rows(std::span<const FeatureRow> rows) override {
    std::string line;
    for (const auto& row : rows) {
      line.clear();
      detail::append_csv_field(line, object_set_);
      line += ',';
      line += std::to_string(row.label);
      for (const auto& v : row.values) {
        line += ',';
        if (v) line += format_double(*v);
      }
      line += '\n';
      emit(line);
    }
  }

  void end_table() override {
    out_.flush();
    if (!out_) throw Error("write to '" + path_.string() + "' failed");
  }

 private:
  void emit(const std::string& line) {
    out_.write(line.data(), static_cast<std::streamsize>(line.size()));
    if (!out_) throw Error("write to '" + path_.string() + "' failed");
  }

  std::filesystem::path path_;
  std::ofstream out_;
  std::string object_set_;
};

inline void write_table(const FeatureTable& table, const std::filesystem::path& path) {
  CsvTableWriter writer(path);
  writer.begin_table(table.object_set, table.columns);
  writer.write_rows(table.rows);
  writer.end_table();
}

inline double parse_double(std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
    throw FormatError("not a finite number: '" + std::string(text) + "'");
  return v;
}

inline FeatureTable read_table(const std::filesystem::path& path) {
  const auto records = detail::parse_csv(detail::read_file(path));
  if (records.empty()) throw FormatError("'" + path.string() + "' has no header");
  const auto& header = records.front();
  if (header.size() < 2 || header[0] != "object_set" || header[1] != "label")
    throw FormatError("'" + path.string() + "' header must start with object_set,label");

  FeatureTable table;
  table.columns.assign(header.begin() + 2, header.end());
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& rec = records[i];
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    if (rec.size() != header.size())
      throw FormatError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                        std::to_string(rec.size()));
    if (i == 1) {
      table.object_set = rec[0];
    } else if (rec[0] != table.object_set) {
      throw FormatError(where + ": mixed object sets in one table");
    }
    FeatureRow row;
    std::uint32_t label = 0;
    auto [ptr, ec] = std::from_chars(rec[1].data(), rec[1].data() + rec[1].size(), label);
    if (ec != std::errc{} || ptr != rec[1].data() + rec[1].size() || rec[1].empty())
      throw FormatError(where + ": bad label '" + rec[1] + "'");
    row.label = label;
    row.values.reserve(table.columns.size());
    for (std::size_t k = 2; k < rec.size(); ++k) {
      if (rec[k].empty()) {
        row.values.emplace_back();
      } else {
        try {
          row.values.emplace_back(parse_double(rec[k]));
        } catch (const FormatError& e) {
          throw FormatError(where + ": " + e.what());
        }
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace mprof
