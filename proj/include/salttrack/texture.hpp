#pragma once

#include <vector>

#include "salttrack/grid.hpp"
#include "salttrack/volume_io.hpp"

namespace salttrack {

enum class GlcmDirection { deg0, deg45, deg90, deg135 };

/// Pixel displacement between the two members of a co-occurring pair.
struct Offset {
  int dx = 0;
  int dy = 0;

  friend bool operator==(const Offset&, const Offset&) = default;
};

/// Direction unit steps with y pointing down (time):
/// 0 -> (1,0), 45 -> (1,-1), 90 -> (0,-1), 135 -> (-1,-1).
Offset direction_step(GlcmDirection d);

struct GlcmConfig {
  int radius = 4;   // analysis window is (2*radius+1)^2
  int levels = 32;  // quantization levels
  std::vector<GlcmDirection> directions{GlcmDirection::deg0, GlcmDirection::deg45,
                                        GlcmDirection::deg90, GlcmDirection::deg135};
  std::vector<int> distances;  // empty means 1..radius

  void validate() const;
  std::vector<int> effective_distances() const;
  /// All direction x distance offsets, direction-major.
  std::vector<Offset> offsets() const;
  int offset_count() const;
};

/// Normalized co-occurrence matrix of ordered level pairs at one offset.
struct Glcm {
  int levels = 0;
  Offset offset;
  std::vector<double> matrix;  // row-major, levels x levels

  double at(int i, int j) const { return matrix[static_cast<std::size_t>(i) * levels + j]; }
};

/// level = min(floor(v * levels), levels - 1). Requires a normalized section.
Grid2D<int> quantize(const SeismicSection& section, int levels);

/// GLCM of the window of radius `radius` around `center`, clipped to the grid.
/// Pairs whose second pixel leaves the window or the grid are dropped; with no
/// pairs left the matrix is all zero.
Glcm glcm_at(const Grid2D<int>& levels, Point center, Offset offset, int radius,
             int n_levels);

/// sum_ij (i-j)^2 G[i,j]
double glcm_contrast(const Glcm& g);

struct ContrastMap {
  Grid2D<double> grid;
  bool normalized = false;
  /// Set when the averaged contrast field was constant; the grid is then zero.
  bool degenerate = false;
};

/// Offset-averaged contrast per pixel before any normalization.
Grid2D<double> mean_contrast(const Grid2D<int>& levels, const GlcmConfig& cfg);

/// Contrast attribute of a normalized section, min-max scaled to [0,1].
ContrastMap contrast_map(const SeismicSection& section, const GlcmConfig& cfg);

}  // namespace salttrack
