#include "salttrack/texture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "salttrack/error.hpp"

namespace salttrack {

Offset direction_step(GlcmDirection d) {
  switch (d) {
    case GlcmDirection::deg0:
      return {1, 0};
    case GlcmDirection::deg45:
      return {1, -1};
    case GlcmDirection::deg90:
      return {0, -1};
    case GlcmDirection::deg135:
      return {-1, -1};
  }
  return {1, 0};
}

void GlcmConfig::validate() const {
  if (radius < 1) fail(ErrorKind::usage, "GLCM radius must be >= 1");
  if (levels < 2) fail(ErrorKind::usage, "GLCM levels must be >= 2");
  if (directions.empty()) fail(ErrorKind::usage, "GLCM needs at least one direction");
  for (int d : distances) {
    if (d < 1 || d > radius) {
      fail(ErrorKind::usage, "GLCM distance must lie in 1..radius");
    }
  }
}

std::vector<int> GlcmConfig::effective_distances() const {
  if (!distances.empty()) return distances;
  std::vector<int> d(static_cast<std::size_t>(std::max(radius, 0)));
  std::iota(d.begin(), d.end(), 1);
  return d;
}

std::vector<Offset> GlcmConfig::offsets() const {
  std::vector<Offset> out;
  const auto dists = effective_distances();
  for (GlcmDirection dir : directions) {
    const Offset step = direction_step(dir);
    for (int d : dists) out.push_back({step.dx * d, step.dy * d});
  }
  return out;
}

int GlcmConfig::offset_count() const {
  return static_cast<int>(directions.size() * effective_distances().size());
}

Grid2D<int> quantize(const SeismicSection& section, int levels) {
  if (levels < 2) fail(ErrorKind::usage, "quantize needs at least 2 levels");
  if (!section.normalized) fail(ErrorKind::data, "quantize requires a normalized section");
  const auto& g = section.grid;
  Grid2D<int> out(g.width(), g.height());
  auto src = g.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double v = src[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      fail(ErrorKind::data, "quantize: value outside [0,1]");
    }
    dst[i] = std::min(static_cast<int>(std::floor(v * levels)), levels - 1);
  }
  return out;
}

Glcm glcm_at(const Grid2D<int>& levels, Point center, Offset offset, int radius,
             int n_levels) {
  if (offset.dx == 0 && offset.dy == 0) fail(ErrorKind::usage, "GLCM offset (0,0)");
  Glcm g;
  g.levels = n_levels;
  g.offset = offset;
  g.matrix.assign(static_cast<std::size_t>(n_levels) * n_levels, 0.0);

  const int x0 = std::max(center.x - radius, 0);
  const int x1 = std::min(center.x + radius, levels.width() - 1);
  const int y0 = std::max(center.y - radius, 0);
  const int y1 = std::min(center.y + radius, levels.height() - 1);
  std::size_t pairs = 0;
  for (int x = x0; x <= x1; ++x) {
    const int xn = x + offset.dx;
    if (xn < x0 || xn > x1) continue;
    for (int y = y0; y <= y1; ++y) {
      const int yn = y + offset.dy;
      if (yn < y0 || yn > y1) continue;
      const int i = levels(x, y);
      const int j = levels(xn, yn);
      g.matrix[static_cast<std::size_t>(i) * n_levels + j] += 1.0;
      ++pairs;
    }
  }
  if (pairs > 0) {
    const double inv = 1.0 / static_cast<double>(pairs);
    for (double& v : g.matrix) v *= inv;
  }
  return g;
}

double glcm_contrast(const Glcm& g) {
  double c = 0.0;
  for (int i = 0; i < g.levels; ++i) {
    for (int j = 0; j < g.levels; ++j) {
      const double d = static_cast<double>(i - j);
      c += d * d * g.at(i, j);
    }
  }
  return c;
}

namespace {

// Summed-area table over (x, y) with a zero border row/column.
class PrefixSum {
 public:
  PrefixSum(int w, int h) : w_(w), h_(h), s_(static_cast<std::size_t>(w + 1) * (h + 1), 0.0) {}

  double& raw(int x, int y) { return s_[static_cast<std::size_t>(x) * (h_ + 1) + y]; }
  double raw(int x, int y) const { return s_[static_cast<std::size_t>(x) * (h_ + 1) + y]; }

  void build(const Grid2D<double>& v) {
    for (int x = 0; x < w_; ++x) {
      for (int y = 0; y < h_; ++y) {
        raw(x + 1, y + 1) = v(x, y) + raw(x, y + 1) + raw(x + 1, y) - raw(x, y);
      }
    }
  }

  // Inclusive rectangle sum.
  double sum(int x0, int y0, int x1, int y1) const {
    return raw(x1 + 1, y1 + 1) - raw(x0, y1 + 1) - raw(x1 + 1, y0) + raw(x0, y0);
  }

 private:
  int w_;
  int h_;
  std::vector<double> s_;
};

}  // namespace

// The contrast of a GLCM equals the mean squared level difference over the
// window's valid pairs, so each offset reduces to a rectangle sum of squared
// differences over the pair origins.
Grid2D<double> mean_contrast(const Grid2D<int>& levels, const GlcmConfig& cfg) {
  cfg.validate();
  const int w = levels.width();
  const int h = levels.height();
  const int r = cfg.radius;
  const auto offsets = cfg.offsets();
  const double inv_ng = 1.0 / static_cast<double>(offsets.size());

  Grid2D<double> out(w, h, 0.0);
  Grid2D<double> sq(w, h, 0.0);
  PrefixSum prefix(w, h);
  for (const Offset& off : offsets) {
    for (int x = 0; x < w; ++x) {
      for (int y = 0; y < h; ++y) {
        const int xn = x + off.dx;
        const int yn = y + off.dy;
        double d = 0.0;
        if (levels.contains(xn, yn)) {
          d = static_cast<double>(levels(x, y) - levels(xn, yn));
        }
        sq(x, y) = d * d;
      }
    }
    prefix.build(sq);
    for (int x = 0; x < w; ++x) {
      const int wx0 = std::max(x - r, 0);
      const int wx1 = std::min(x + r, w - 1);
      // origin q must satisfy q and q + off inside the window
      const int qx0 = std::max(wx0, wx0 - off.dx);
      const int qx1 = std::min(wx1, wx1 - off.dx);
      for (int y = 0; y < h; ++y) {
        const int wy0 = std::max(y - r, 0);
        const int wy1 = std::min(y + r, h - 1);
        const int qy0 = std::max(wy0, wy0 - off.dy);
        const int qy1 = std::min(wy1, wy1 - off.dy);
        if (qx0 > qx1 || qy0 > qy1) continue;
        const double count = static_cast<double>(qx1 - qx0 + 1) * (qy1 - qy0 + 1);
        out(x, y) += inv_ng * (prefix.sum(qx0, qy0, qx1, qy1) / count);
      }
    }
  }
  return out;
}

ContrastMap contrast_map(const SeismicSection& section, const GlcmConfig& cfg) {
  cfg.validate();
  const Grid2D<int> levels = quantize(section, cfg.levels);
  ContrastMap map;
  map.grid = mean_contrast(levels, cfg);
  map.normalized = true;
  auto values = map.grid.values();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double min = *lo;
  const double range = *hi - *lo;
  if (!(range > 0.0)) {
    std::fill(values.begin(), values.end(), 0.0);
    map.degenerate = true;
    return map;
  }
  for (double& v : values) v = std::clamp((v - min) / range, 0.0, 1.0);
  return map;
}

}  // namespace salttrack
