#include "salttrack/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "salttrack/boundary.hpp"
#include "salttrack/error.hpp"

namespace salttrack {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

bool adjacent(Point a, Point b) {
  return std::abs(a.x - b.x) <= 1 && std::abs(a.y - b.y) <= 1;
}

double center_x_at(const SynthSpec& spec, int inline_index) {
  return spec.center_x + spec.drift * (inline_index - spec.inline_count / 2);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t bits = splitmix64(seed + counter * kGolden) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double counter_gaussian(std::uint64_t seed, std::uint64_t counter) {
  const double u1 = counter_uniform(seed, 2 * counter);
  const double u2 = counter_uniform(seed, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void SynthSpec::validate() const {
  if (inline_count < 1 || crossline_count < 1 || time_count < 1) {
    fail(ErrorKind::usage, "synthetic volume needs positive dimensions");
  }
  if (time_step_ms <= 0) fail(ErrorKind::usage, "time step must be positive");
  if (!(radius_x >= 2.0 && radius_y >= 2.0)) fail(ErrorKind::usage, "dome radii must be >= 2");
  if (!(noise_sigma >= 0.0)) fail(ErrorKind::usage, "noise sigma must be >= 0");
  if (!(layer_period > 0.0)) fail(ErrorKind::usage, "layer period must be positive");
  for (int idx : {0, inline_count - 1}) {
    const double cx = center_x_at(*this, idx);
    if (std::lround(cx - radius_x) < margin ||
        std::lround(cx + radius_x) > crossline_count - 1 - margin ||
        std::lround(center_y - radius_y) < margin || flank_bottom > time_count - 1 - margin ||
        flank_bottom < std::lround(center_y)) {
      fail(ErrorKind::usage, "dome does not fit inside the section with the required margin");
    }
  }
}

std::vector<Point> dome_boundary(const SynthSpec& spec, int inline_index) {
  const double cx = center_x_at(spec, inline_index);
  const int left = static_cast<int>(std::lround(cx - spec.radius_x));
  const int right = static_cast<int>(std::lround(cx + spec.radius_x));
  const int mid_y = static_cast<int>(std::lround(spec.center_y));

  std::vector<Point> raw;
  for (int y = spec.flank_bottom; y > mid_y; --y) raw.push_back({left, y});
  const int steps = 8 * static_cast<int>(std::ceil(spec.radius_x + spec.radius_y)) + 64;
  for (int k = 0; k <= steps; ++k) {
    const double theta = std::numbers::pi * (1.0 - static_cast<double>(k) / steps);
    raw.push_back({static_cast<int>(std::lround(cx + spec.radius_x * std::cos(theta))),
                   static_cast<int>(std::lround(spec.center_y - spec.radius_y * std::sin(theta)))});
  }
  for (int y = mid_y + 1; y <= spec.flank_bottom; ++y) raw.push_back({right, y});

  // de-duplicate, bridge any gap, then drop redundant corner pixels
  std::vector<Point> pts;
  for (const Point& p : raw) {
    if (!pts.empty() && pts.back() == p) continue;
    if (!pts.empty() && !adjacent(pts.back(), p)) {
      const auto seg = rasterize_line(pts.back(), p);
      pts.insert(pts.end(), seg.begin() + 1, seg.end() - 1);
    }
    pts.push_back(p);
  }
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Point> thin;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!thin.empty() && i + 1 < pts.size() && adjacent(thin.back(), pts[i + 1])) {
        changed = true;
        continue;
      }
      thin.push_back(pts[i]);
    }
    pts = std::move(thin);
  }
  return pts;
}

Grid2D<unsigned char> dome_mask(const SynthSpec& spec, int inline_index) {
  Grid2D<unsigned char> mask(spec.crossline_count, spec.time_count, 0);
  std::vector<int> top(static_cast<std::size_t>(spec.crossline_count), spec.time_count);
  for (const Point& p : dome_boundary(spec, inline_index)) {
    if (p.x >= 0 && p.x < spec.crossline_count) {
      auto& t = top[static_cast<std::size_t>(p.x)];
      t = std::min(t, p.y);
    }
  }
  for (int x = 0; x < spec.crossline_count; ++x) {
    for (int y = top[static_cast<std::size_t>(x)]; y < spec.time_count; ++y) mask(x, y) = 1;
  }
  return mask;
}

SynthResult generate(const SynthSpec& spec) {
  spec.validate();
  VolumeHeader h;
  h.inline_start = spec.inline_start;
  h.inline_count = spec.inline_count;
  h.crossline_start = spec.crossline_start;
  h.crossline_count = spec.crossline_count;
  h.time_start_ms = spec.time_start_ms;
  h.time_step_ms = spec.time_step_ms;
  h.time_count = spec.time_count;

  const int w = spec.crossline_count;
  const int t = spec.time_count;
  std::vector<float> samples(h.sample_count());
  std::vector<BoundaryRecord> truth;
  const double two_pi = 2.0 * std::numbers::pi;
  for (int il = 0; il < spec.inline_count; ++il) {
    const auto mask = dome_mask(spec, il);
    const auto boundary = dome_boundary(spec, il);
    const int reach = static_cast<int>(std::ceil(4.0 * spec.reflection_width));
    // distance to the interface, only evaluated near it
    Grid2D<double> dist(w, t, std::numeric_limits<double>::infinity());
    for (const Point& b : boundary) {
      for (int x = std::max(b.x - reach, 0); x <= std::min(b.x + reach, w - 1); ++x) {
        for (int y = std::max(b.y - reach, 0); y <= std::min(b.y + reach, t - 1); ++y) {
          dist(x, y) = std::min(dist(x, y), std::hypot(double(x - b.x), double(y - b.y)));
        }
      }
    }
    for (int x = 0; x < w; ++x) {
      for (int y = 0; y < t; ++y) {
        const std::uint64_t counter =
            (static_cast<std::uint64_t>(il) * static_cast<std::uint64_t>(w) + x) *
                static_cast<std::uint64_t>(t) + y;
        const double noise =
            spec.noise_sigma > 0.0 ? spec.noise_sigma * counter_gaussian(spec.seed, counter) : 0.0;
        double v;
        if (mask(x, y) != 0) {
          v = spec.interior_level +
              spec.interior_ripple * std::sin(two_pi * x / 37.0) * std::sin(two_pi * y / 23.0) +
              0.25 * noise;
        } else {
          v = std::sin(two_pi * (y + spec.layer_dip * x) / spec.layer_period) + noise;
        }
        if (spec.reflection_width > 0.0 && std::isfinite(dist(x, y))) {
          const double r = dist(x, y) / spec.reflection_width;
          v += spec.boundary_reflection * std::exp(-r * r);
        }
        samples[(static_cast<std::size_t>(il) * w + x) * t + y] = static_cast<float>(v);
      }
    }
    truth.push_back({spec.inline_start + il, dome_boundary(spec, il)});
  }
  return {SeismicVolume(h, std::move(samples)), std::move(truth)};
}

}  // namespace salttrack
