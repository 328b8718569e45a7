#include "salttrack/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "salttrack/error.hpp"

namespace salttrack {

bool patch_admissible(Point p, PatchDims dims, SectionExtent extent) {
  const int h1 = dims.i1 / 2;
  const int h2 = dims.i2 / 2;
  return p.x - h1 >= 0 && p.y - h2 >= 0 && p.x + h1 < extent.width &&
         p.y + h2 < extent.height;
}

BoundaryCurve order_boundary(std::span<const Point> raw_points, PatchDims patch,
                             SectionExtent extent) {
  auto key = [](Point p) { return std::pair{p.x, p.y}; };
  std::set<std::pair<int, int>> remaining;
  for (const Point& p : raw_points) {
    if (patch_admissible(p, patch, extent)) remaining.insert(key(p));
  }
  if (remaining.empty()) fail(ErrorKind::data, "no admissible start point");

  Point start = {remaining.begin()->first, remaining.begin()->second};
  for (const auto& [x, y] : remaining) {
    if (y > start.y || (y == start.y && x < start.x)) start = {x, y};
  }

  BoundaryCurve curve;
  curve.points.push_back(start);
  remaining.erase(key(start));
  Point cur = start;
  while (!remaining.empty()) {
    bool moved = false;
    for (const Point& step : kTraversalPriority) {
      const Point next{cur.x + step.x, cur.y + step.y};
      auto it = remaining.find(key(next));
      if (it != remaining.end()) {
        remaining.erase(it);
        curve.points.push_back(next);
        cur = next;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (!remaining.empty()) {
    fail(ErrorKind::data, "disconnected boundary: " + std::to_string(remaining.size()) +
                              " admissible points unreachable from the start point");
  }
  return curve;
}

std::vector<Vec2> to_vec2(std::span<const Point> points) {
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (const Point& p : points) out.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
  return out;
}

Vec2 normal_at(std::span<const Vec2> points, std::size_t index, int half_window) {
  if (points.size() < 2) fail(ErrorKind::data, "normal needs at least 2 curve points");
  if (index >= points.size()) fail(ErrorKind::usage, "normal index out of range");
  const std::size_t w = static_cast<std::size_t>(std::max(half_window, 1));
  const std::size_t lo = index >= w ? index - w : 0;
  const std::size_t hi = std::min(points.size() - 1, index + w);

  double mx = 0.0, my = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    mx += points[i].x;
    my += points[i].y;
  }
  const double n = static_cast<double>(hi - lo + 1);
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double dx = points[i].x - mx;
    const double dy = points[i].y - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  const double chord_x = points[hi].x - points[lo].x;
  const double chord_y = points[hi].y - points[lo].y;
  double tx = 0.0, ty = 0.0;
  const double spread = sxx + syy;
  if (!(spread > 0.0)) fail(ErrorKind::numerical, "zero-length tangent");
  if (std::abs(sxx - syy) <= 1e-12 * spread && std::abs(sxy) <= 1e-12 * spread) {
    // isotropic scatter: fall back to the chord
    const double len = std::hypot(chord_x, chord_y);
    if (!(len > 0.0)) fail(ErrorKind::numerical, "zero-length tangent");
    tx = chord_x / len;
    ty = chord_y / len;
  } else {
    const double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    tx = std::cos(theta);
    ty = std::sin(theta);
  }
  if (tx * chord_x + ty * chord_y < 0.0) {
    tx = -tx;
    ty = -ty;
  }
  return {-ty, tx};
}

Vec2 normal_at(const BoundaryCurve& curve, std::size_t index, int half_window) {
  const auto pts = to_vec2(curve.points);
  return normal_at(pts, index, half_window);
}

FilterResult filter_tracked_points(std::span<const int> offsets, int window,
                                   double rejection_px) {
  const std::size_t n = offsets.size();
  const std::size_t win = static_cast<std::size_t>(std::max(window, 1));
  if (n < win) {
    fail(ErrorKind::data, "too few tracked points to filter (" + std::to_string(n) + ")");
  }
  FilterResult r;
  r.keep.assign(n, true);
  r.medians.assign(n, 0.0);
  std::vector<int> buf(win);
  for (std::size_t i = 0; i < n; ++i) {
    // length-`win` window centered at i, shifted inward at the ends
    std::size_t lo = i >= win / 2 ? i - win / 2 : 0;
    lo = std::min(lo, n - win);
    std::copy(offsets.begin() + static_cast<std::ptrdiff_t>(lo),
              offsets.begin() + static_cast<std::ptrdiff_t>(lo + win), buf.begin());
    std::sort(buf.begin(), buf.end());
    const double median = win % 2 == 1
                              ? static_cast<double>(buf[win / 2])
                              : 0.5 * (buf[win / 2 - 1] + buf[win / 2]);
    r.medians[i] = median;
    if (std::abs(offsets[i] - median) > rejection_px) {
      r.keep[i] = false;
      ++r.removed;
    }
  }
  if (2 * r.removed > n) {
    fail(ErrorKind::numerical, "tracking unstable: " + std::to_string(r.removed) + " of " +
                                   std::to_string(n) + " points rejected");
  }
  return r;
}

namespace {

// round(num / den) with halves rounded up, den > 0
int round_ratio(long long num, long long den) {
  long long q = 2 * num + den;
  long long d = 2 * den;
  long long r = q / d;
  if ((q % d != 0) && (q < 0)) --r;
  return static_cast<int>(r);
}

}  // namespace

std::vector<Point> rasterize_line(Point a, Point b) {
  const int dx = b.x - a.x;
  const int dy = b.y - a.y;
  const int n = std::max(std::abs(dx), std::abs(dy));
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  if (n == 0) {
    out.push_back(a);
    return out;
  }
  for (int k = 0; k <= n; ++k) {
    out.push_back({a.x + round_ratio(static_cast<long long>(k) * dx, n),
                   a.y + round_ratio(static_cast<long long>(k) * dy, n)});
  }
  return out;
}

std::vector<Point> thin_chain(std::span<const Point> chain) {
  auto adjacent = [](Point a, Point b) {
    return std::abs(a.x - b.x) <= 1 && std::abs(a.y - b.y) <= 1;
  };
  std::vector<Point> pts(chain.begin(), chain.end());
  bool changed = true;
  while (changed && pts.size() > 2) {
    changed = false;
    std::vector<Point> out;
    out.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!out.empty() && out.back() == pts[i]) {
        changed = true;
        continue;
      }
      if (!out.empty() && i + 1 < pts.size() && adjacent(out.back(), pts[i + 1])) {
        changed = true;
        continue;
      }
      out.push_back(pts[i]);
    }
    pts = std::move(out);
  }
  return pts;
}

BoundaryCurve connect_points(std::span<const Point> points) {
  if (points.size() < 2) fail(ErrorKind::data, "connect_points needs at least 2 points");
  std::vector<Point> chain{points.front()};
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto seg = rasterize_line(chain.back(), points[i]);
    for (std::size_t k = 1; k < seg.size(); ++k) {
      if (!(seg[k] == chain.back())) chain.push_back(seg[k]);
    }
  }
  BoundaryCurve curve;
  curve.points = thin_chain(chain);
  return curve;
}

double discrete_frechet(std::span<const Vec2> a, std::span<const Vec2> b) {
  if (a.empty() || b.empty()) fail(ErrorKind::usage, "Frechet distance of an empty curve");
  auto dist = [&](std::size_t i, std::size_t j) {
    return std::hypot(a[i].x - b[j].x, a[i].y - b[j].y);
  };
  const std::size_t m = b.size();
  std::vector<double> prev(m), cur(m);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = dist(i, j);
      double best;
      if (i == 0 && j == 0) {
        best = d;
      } else if (i == 0) {
        best = std::max(cur[j - 1], d);
      } else if (j == 0) {
        best = std::max(prev[j], d);
      } else {
        best = std::max(std::min({prev[j], prev[j - 1], cur[j - 1]}), d);
      }
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

double discrete_frechet(std::span<const Point> a, std::span<const Point> b) {
  const auto va = to_vec2(a);
  const auto vb = to_vec2(b);
  return discrete_frechet(std::span<const Vec2>(va), std::span<const Vec2>(vb));
}

std::vector<std::vector<Vec2>> split_equal_arc(std::span<const Vec2> points, int count) {
  if (count < 1) fail(ErrorKind::usage, "segment count must be >= 1");
  if (points.size() < 2) fail(ErrorKind::data, "degenerate segmentation: fewer than 2 points");
  std::vector<double> cum(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) {
    cum[i] = cum[i - 1] + std::hypot(points[i].x - points[i - 1].x, points[i].y - points[i - 1].y);
  }
  const double total = cum.back();
  if (!(total > 0.0)) fail(ErrorKind::data, "degenerate segmentation: zero-length curve");

  auto at = [&](double s) {
    auto it = std::upper_bound(cum.begin(), cum.end(), s);
    std::size_t hi = static_cast<std::size_t>(it - cum.begin());
    if (hi >= cum.size()) return points.back();
    if (hi == 0) return points.front();
    const std::size_t lo = hi - 1;
    const double span = cum[hi] - cum[lo];
    const double f = span > 0.0 ? (s - cum[lo]) / span : 0.0;
    return Vec2{points[lo].x + f * (points[hi].x - points[lo].x),
                points[lo].y + f * (points[hi].y - points[lo].y)};
  };

  std::vector<std::vector<Vec2>> out(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    const double s0 = total * s / count;
    const double s1 = s + 1 == count ? total : total * (s + 1) / count;
    auto& seg = out[static_cast<std::size_t>(s)];
    seg.push_back(s == 0 ? points.front() : at(s0));
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (cum[i] > s0 && cum[i] < s1) seg.push_back(points[i]);
    }
    seg.push_back(s + 1 == count ? points.back() : at(s1));
  }
  return out;
}

SimilarityReport similarity_index(const BoundaryCurve& tracked, const BoundaryCurve& truth,
                                  int segments) {
  if (segments < 1) fail(ErrorKind::usage, "segment count must be >= 1");
  const auto m = static_cast<std::size_t>(segments);
  if (tracked.size() < m || truth.size() < m) {
    fail(ErrorKind::data, "degenerate segmentation: curve shorter than the segment count");
  }
  const auto a = to_vec2(tracked.points);
  const auto b = to_vec2(truth.points);
  const auto sa = split_equal_arc(a, segments);
  const auto sb = split_equal_arc(b, segments);
  SimilarityReport r;
  r.per_segment.reserve(m);
  double sum = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    const double d = discrete_frechet(std::span<const Vec2>(sa[s]), std::span<const Vec2>(sb[s]));
    r.per_segment.push_back(d);
    sum += d;
  }
  r.mean_segment_frechet = sum / static_cast<double>(m);
  r.similarity_index = 1.0 / (1.0 + r.mean_segment_frechet);
  return r;
}

double mean_deviation(const BoundaryCurve& tracked, const BoundaryCurve& truth) {
  if (tracked.points.empty() || truth.points.empty()) {
    fail(ErrorKind::data, "deviation of an empty curve");
  }
  double sum = 0.0;
  for (const Point& p : tracked.points) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point& q : truth.points) {
      best = std::min(best, std::hypot(double(p.x - q.x), double(p.y - q.y)));
    }
    sum += best;
  }
  return sum / static_cast<double>(tracked.points.size());
}

}  // namespace salttrack
