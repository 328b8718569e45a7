#pragma once

#include <array>
#include <span>
#include <vector>

#include "salttrack/grid.hpp"
#include "salttrack/volume_io.hpp"

namespace salttrack {

/// Ordered boundary polyline inside one section.
struct BoundaryCurve {
  std::vector<Point> points;
  bool closed = false;

  std::size_t size() const noexcept { return points.size(); }
  friend bool operator==(const BoundaryCurve&, const BoundaryCurve&) = default;
};

/// Patch extent along crossline (i1) and time (i2); both odd.
struct PatchDims {
  int i1 = 31;
  int i2 = 31;

  friend bool operator==(const PatchDims&, const PatchDims&) = default;
};

/// True when the patch centered at `p` lies fully inside the section.
bool patch_admissible(Point p, PatchDims dims, SectionExtent extent);

/// Neighbor search order used while tracing a boundary: clockwise from
/// 12 o'clock (y grows downward).
inline constexpr std::array<Point, 8> kTraversalPriority{{
    {0, -1},   // up
    {1, -1},   // up-right
    {1, 0},    // right
    {1, 1},    // down-right
    {0, 1},    // down
    {-1, 1},   // down-left
    {-1, 0},   // left
    {-1, -1},  // up-left
}};

/// Orders a thin 8-connected point set for traversal. Inadmissible points are
/// dropped; the walk starts at the bottom-left admissible point (max y, then
/// min x) and repeatedly takes the first unvisited neighbor in
/// kTraversalPriority. Throws Error(data) if no point is admissible or the
/// walk cannot reach every admissible point.
BoundaryCurve order_boundary(std::span<const Point> raw_points, PatchDims patch,
                             SectionExtent extent);

/// Unit normal from a total-least-squares tangent fit over points
/// [index - half_window, index + half_window] (clipped at the ends). The
/// tangent is oriented along the traversal and the normal is its left-hand
/// perpendicular (-ty, tx).
Vec2 normal_at(std::span<const Vec2> points, std::size_t index, int half_window = 5);
Vec2 normal_at(const BoundaryCurve& curve, std::size_t index, int half_window = 5);

struct FilterResult {
  std::vector<bool> keep;
  std::vector<double> medians;
  std::size_t removed = 0;
};

/// Sliding-median outlier rejection on the signed normal offsets of tracked
/// points. A point is dropped when it deviates from the median of its
/// length-`window` neighborhood by more than `rejection_px`. Throws
/// Error(data) for fewer than `window` points and Error(numerical,
/// "tracking unstable") when more than half the points are dropped.
FilterResult filter_tracked_points(std::span<const int> offsets, int window = 5,
                                   double rejection_px = 3.0);

/// 8-connected raster segment from a to b inclusive; the minor coordinate is
/// rounded half up at each major-axis step.
std::vector<Point> rasterize_line(Point a, Point b);

/// Removes repeated points and corner pixels whose neighbors along the chain
/// are already 8-adjacent, leaving a 1-pixel-wide chain with the same ends.
std::vector<Point> thin_chain(std::span<const Point> chain);

/// Bridges consecutive points with raster segments and thins the result.
/// Requires >= 2 points.
BoundaryCurve connect_points(std::span<const Point> points);

/// Discrete Frechet distance (coupling min-max of Euclidean distances).
double discrete_frechet(std::span<const Vec2> a, std::span<const Vec2> b);
double discrete_frechet(std::span<const Point> a, std::span<const Point> b);

std::vector<Vec2> to_vec2(std::span<const Point> points);

/// Splits a polyline into `count` pieces of equal arc length. Cut positions
/// are interpolated, so consecutive pieces share their end/start point.
std::vector<std::vector<Vec2>> split_equal_arc(std::span<const Vec2> points, int count);

struct SimilarityReport {
  double mean_segment_frechet = 0.0;
  double similarity_index = 1.0;
  std::vector<double> per_segment;
};

/// Mean of segment-wise discrete Frechet distances d, reported as
/// similarity 1 / (1 + d).
SimilarityReport similarity_index(const BoundaryCurve& tracked, const BoundaryCurve& truth,
                                  int segments = 10);

/// Mean distance from each tracked point to the nearest truth point.
double mean_deviation(const BoundaryCurve& tracked, const BoundaryCurve& truth);

}  // namespace salttrack
