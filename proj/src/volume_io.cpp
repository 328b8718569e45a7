#include "salttrack/volume_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "salttrack/error.hpp"

namespace salttrack {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kHeaderFile = "header.json";
constexpr const char* kSamplesFile = "samples.f32";

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) |
           (v >> 24);
  }
}

std::vector<char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::data, "unreadable file: " + path.string());
  return std::vector<char>(std::istreambuf_iterator<char>(in), {});
}

void write_bytes(const fs::path& path, const char* data, std::size_t n) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::data, "cannot write file: " + path.string());
  out.write(data, static_cast<std::streamsize>(n));
  if (!out) fail(ErrorKind::data, "write failed: " + path.string());
}

json read_json(const fs::path& path) {
  auto bytes = read_bytes(path);
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    fail(ErrorKind::data, "malformed header: " + std::string(e.what()));
  }
}

int int_field(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    fail(ErrorKind::data, std::string("malformed header: missing integer key '") +
                              key + "'");
  }
  return j.at(key).get<int>();
}

std::string string_field(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    fail(ErrorKind::data,
         std::string("malformed header: missing string key '") + key + "'");
  }
  return j.at(key).get<std::string>();
}

void write_text(const fs::path& path, const std::string& text) {
  write_bytes(path, text.data(), text.size());
}

}  // namespace

std::vector<char> encode_f32le(const std::vector<float>& values) {
  std::vector<char> bytes(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t bits = to_little(std::bit_cast<std::uint32_t>(values[i]));
    std::memcpy(bytes.data() + 4 * i, &bits, 4);
  }
  return bytes;
}

std::vector<float> decode_f32le(const std::vector<char>& bytes) {
  if (bytes.size() % 4 != 0) {
    fail(ErrorKind::data, "sample-count mismatch: byte length not a multiple of 4");
  }
  std::vector<float> values(bytes.size() / 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, bytes.data() + 4 * i, 4);
    values[i] = std::bit_cast<float>(to_little(bits));
  }
  return values;
}

void VolumeHeader::validate() const {
  if (inline_count < 1 || crossline_count < 1 || time_count < 1) {
    fail(ErrorKind::data, "empty dimension");
  }
  if (time_step_ms <= 0) fail(ErrorKind::data, "time step must be positive");
  if (value_encoding != "float32-le") {
    fail(ErrorKind::data, "unsupported value_encoding '" + value_encoding + "'");
  }
}

SeismicVolume::SeismicVolume(VolumeHeader header, std::vector<float> samples)
    : header_(std::move(header)), samples_(std::move(samples)) {
  header_.validate();
  if (samples_.size() != header_.sample_count()) {
    fail(ErrorKind::data, "sample-count mismatch: expected " +
                              std::to_string(header_.sample_count()) + ", got " +
                              std::to_string(samples_.size()));
  }
}

SeismicSection SeismicVolume::section(int inline_no) const {
  if (!header_.has_inline(inline_no)) {
    fail(ErrorKind::usage, "inline " + std::to_string(inline_no) + " not in volume");
  }
  const int il = inline_no - header_.inline_start;
  SeismicSection s;
  s.inline_no = inline_no;
  s.grid = Grid2D<double>(header_.crossline_count, header_.time_count);
  const float* src = samples_.data() + offset(il, 0, 0);
  std::transform(src, src + s.grid.size(), s.grid.data(),
                 [](float v) { return static_cast<double>(v); });
  return s;
}

SeismicVolume load_volume(const fs::path& dir) {
  const json j = read_json(dir / kHeaderFile);
  if (!j.is_object()) fail(ErrorKind::data, "malformed header: not an object");
  VolumeHeader h;
  h.inline_start = int_field(j, "inline_start");
  h.inline_count = int_field(j, "inline_count");
  h.crossline_start = int_field(j, "crossline_start");
  h.crossline_count = int_field(j, "crossline_count");
  h.time_start_ms = int_field(j, "time_start_ms");
  h.time_step_ms = int_field(j, "time_step_ms");
  h.time_count = int_field(j, "time_count");
  h.value_encoding = string_field(j, "value_encoding");
  h.validate();
  auto samples = decode_f32le(read_bytes(dir / kSamplesFile));
  return SeismicVolume(h, std::move(samples));
}

void save_volume(const SeismicVolume& volume, const fs::path& dir) {
  fs::create_directories(dir);
  const auto& h = volume.header();
  json j;
  j["inline_start"] = h.inline_start;
  j["inline_count"] = h.inline_count;
  j["crossline_start"] = h.crossline_start;
  j["crossline_count"] = h.crossline_count;
  j["time_start_ms"] = h.time_start_ms;
  j["time_step_ms"] = h.time_step_ms;
  j["time_count"] = h.time_count;
  j["value_encoding"] = h.value_encoding;
  write_text(dir / kHeaderFile, j.dump(2) + "\n");
  const auto bytes = encode_f32le(volume.samples());
  write_bytes(dir / kSamplesFile, bytes.data(), bytes.size());
}

SeismicSection normalize_section(const SeismicSection& section) {
  const auto values = section.grid.values();
  if (values.empty()) fail(ErrorKind::data, "degenerate range: empty section");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double min = *lo;
  const double range = *hi - *lo;
  if (!(range > 0.0) || !std::isfinite(range)) {
    fail(ErrorKind::data, "degenerate range");
  }
  SeismicSection out = section;
  for (double& v : out.grid.values()) {
    v = std::clamp((v - min) / range, 0.0, 1.0);
  }
  out.normalized = true;
  return out;
}

SeismicSection normalize_section_or_zero(const SeismicSection& section) {
  try {
    return normalize_section(section);
  } catch (const Error&) {
    SeismicSection out = section;
    std::fill(out.grid.values().begin(), out.grid.values().end(), 0.0);
    out.normalized = true;
    return out;
  }
}

// --- boundary CSV -----------------------------------------------------------

namespace {

int parse_int(std::string_view field, std::size_t line_no) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
    field.remove_prefix(1);
  }
  while (!field.empty() &&
         (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    fail(ErrorKind::data, "non-integer field '" + std::string(field) +
                              "' on line " + std::to_string(line_no));
  }
  return value;
}

}  // namespace

void validate_boundary(const BoundaryRecord& record, SectionExtent extent) {
  if (record.points.empty()) fail(ErrorKind::data, "boundary has no points");
  for (const Point& p : record.points) {
    if (p.x < 0 || p.y < 0 || p.x >= extent.width || p.y >= extent.height) {
      fail(ErrorKind::data, "boundary point (" + std::to_string(p.x) + "," +
                                std::to_string(p.y) + ") out of section bounds " +
                                std::to_string(extent.width) + "x" +
                                std::to_string(extent.height));
    }
  }
}

BoundaryRecord parse_boundary(const std::string& text,
                              std::optional<SectionExtent> extent) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  bool have_inline = false;
  BoundaryRecord record;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "inline,crossline,time") {
        fail(ErrorKind::data, "boundary CSV must start with 'inline,crossline,time'");
      }
      header_seen = true;
      continue;
    }
    std::string_view view(line);
    const auto c1 = view.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : view.find(',', c1 + 1);
    if (c2 == std::string_view::npos || view.find(',', c2 + 1) != std::string_view::npos) {
      fail(ErrorKind::data, "expected 3 fields on line " + std::to_string(line_no));
    }
    const int il = parse_int(view.substr(0, c1), line_no);
    const int xl = parse_int(view.substr(c1 + 1, c2 - c1 - 1), line_no);
    const int t = parse_int(view.substr(c2 + 1), line_no);
    if (!have_inline) {
      record.inline_no = il;
      have_inline = true;
    } else if (il != record.inline_no) {
      fail(ErrorKind::data, "mixed inline numbers in boundary file");
    }
    record.points.push_back({xl, t});
  }
  if (!header_seen) fail(ErrorKind::data, "empty boundary file");
  if (record.points.empty()) fail(ErrorKind::data, "boundary has no points");
  if (extent) validate_boundary(record, *extent);
  return record;
}

BoundaryRecord load_boundary(const fs::path& path, std::optional<SectionExtent> extent) {
  const auto bytes = read_bytes(path);
  return parse_boundary(std::string(bytes.begin(), bytes.end()), extent);
}

std::string format_boundary(const BoundaryRecord& record) {
  std::string out = "inline,crossline,time\n";
  for (const Point& p : record.points) {
    out += std::to_string(record.inline_no);
    out += ',';
    out += std::to_string(p.x);
    out += ',';
    out += std::to_string(p.y);
    out += '\n';
  }
  return out;
}

void save_boundary(const BoundaryRecord& record, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_text(path, format_boundary(record));
}

// --- 2D planes --------------------------------------------------------------

void save_plane(const PlaneFile& plane, const fs::path& dir) {
  fs::create_directories(dir);
  json j;
  j["kind"] = plane.kind;
  j["inline_no"] = plane.inline_no;
  j["crossline_count"] = plane.grid.width();
  j["time_count"] = plane.grid.height();
  j["value_encoding"] = "float32-le";
  write_text(dir / kHeaderFile, j.dump(2) + "\n");
  const std::vector<float> values(plane.grid.values().begin(), plane.grid.values().end());
  const auto bytes = encode_f32le(values);
  write_bytes(dir / kSamplesFile, bytes.data(), bytes.size());
}

PlaneFile load_plane(const fs::path& dir) {
  const json j = read_json(dir / kHeaderFile);
  if (!j.is_object()) fail(ErrorKind::data, "malformed header: not an object");
  PlaneFile plane;
  plane.kind = string_field(j, "kind");
  plane.inline_no = int_field(j, "inline_no");
  const int w = int_field(j, "crossline_count");
  const int h = int_field(j, "time_count");
  if (w < 1 || h < 1) fail(ErrorKind::data, "empty dimension");
  if (string_field(j, "value_encoding") != "float32-le") {
    fail(ErrorKind::data, "unsupported value_encoding");
  }
  const auto values = decode_f32le(read_bytes(dir / kSamplesFile));
  if (values.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {
    fail(ErrorKind::data, "sample-count mismatch");
  }
  plane.grid = Grid2D<float>(w, h);
  std::copy(values.begin(), values.end(), plane.grid.data());
  return plane;
}

}  // namespace salttrack
