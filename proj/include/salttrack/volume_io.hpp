#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "salttrack/grid.hpp"

namespace salttrack {

/// Geometry of a stored volume. Counts are in samples; time metadata is kept
/// for provenance only, processing is index based.
struct VolumeHeader {
  int inline_start = 0;
  int inline_count = 0;
  int crossline_start = 0;
  int crossline_count = 0;
  int time_start_ms = 0;
  int time_step_ms = 0;
  int time_count = 0;
  std::string value_encoding = "float32-le";

  /// Throws Error(data) when a count is < 1 or the time step is not positive.
  void validate() const;

  std::size_t sample_count() const noexcept {
    return static_cast<std::size_t>(inline_count) *
           static_cast<std::size_t>(crossline_count) *
           static_cast<std::size_t>(time_count);
  }

  bool has_inline(int inline_no) const noexcept {
    return inline_no >= inline_start && inline_no < inline_start + inline_count;
  }

  friend bool operator==(const VolumeHeader&, const VolumeHeader&) = default;
};

/// One inline slice; grid is indexed (crossline index, time index).
struct SeismicSection {
  int inline_no = 0;
  Grid2D<double> grid;
  bool normalized = false;
};

class SeismicVolume {
 public:
  SeismicVolume() = default;
  SeismicVolume(VolumeHeader header, std::vector<float> samples);

  const VolumeHeader& header() const noexcept { return header_; }
  const std::vector<float>& samples() const noexcept { return samples_; }

  /// Linear offset ((il * crossline_count) + xl) * time_count + t, with
  /// 0-based indices.
  std::size_t offset(int il, int xl, int t) const noexcept {
    return (static_cast<std::size_t>(il) * header_.crossline_count + xl) *
               static_cast<std::size_t>(header_.time_count) +
           t;
  }

  float sample(int il, int xl, int t) const { return samples_[offset(il, xl, t)]; }

  /// Raw (unnormalized) section for an absolute inline number.
  SeismicSection section(int inline_no) const;

  friend bool operator==(const SeismicVolume&, const SeismicVolume&) = default;

 private:
  VolumeHeader header_;
  std::vector<float> samples_;
};

/// Reads `<dir>/header.json` and `<dir>/samples.f32`.
SeismicVolume load_volume(const std::filesystem::path& dir);
void save_volume(const SeismicVolume& volume, const std::filesystem::path& dir);

/// Per-section min-max scaling to [0,1]. Throws Error(data, "degenerate
/// range") for constant sections.
SeismicSection normalize_section(const SeismicSection& section);

/// Same as normalize_section but maps a constant section to all zeros.
SeismicSection normalize_section_or_zero(const SeismicSection& section);

/// Labeled boundary of one inline. Points are (crossline index, time index),
/// both 0-based within the section.
struct BoundaryRecord {
  int inline_no = 0;
  std::vector<Point> points;

  friend bool operator==(const BoundaryRecord&, const BoundaryRecord&) = default;
};

struct SectionExtent {
  int width = 0;   // crossline count
  int height = 0;  // time count
};

/// CSV with header `inline,crossline,time` and one `inline,crossline,time`
/// row per point. When `extent` is given every point is bounds-checked.
BoundaryRecord load_boundary(const std::filesystem::path& path,
                             std::optional<SectionExtent> extent = std::nullopt);
void save_boundary(const BoundaryRecord& record, const std::filesystem::path& path);
std::string format_boundary(const BoundaryRecord& record);
BoundaryRecord parse_boundary(const std::string& text,
                              std::optional<SectionExtent> extent = std::nullopt);
void validate_boundary(const BoundaryRecord& record, SectionExtent extent);

/// 2D attribute grid stored as `<dir>/header.json` (with `kind`) plus
/// `<dir>/samples.f32`, x-major with y fastest.
struct PlaneFile {
  std::string kind;
  int inline_no = 0;
  Grid2D<float> grid;
};

void save_plane(const PlaneFile& plane, const std::filesystem::path& dir);
PlaneFile load_plane(const std::filesystem::path& dir);

// Raw little-endian float32 helpers, independent of host byte order.
std::vector<char> encode_f32le(const std::vector<float>& values);
std::vector<float> decode_f32le(const std::vector<char>& bytes);

}  // namespace salttrack
