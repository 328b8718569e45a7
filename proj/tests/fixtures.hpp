#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "salttrack/synthgen.hpp"
#include "salttrack/volume_io.hpp"

namespace fixtures {

/// Horizontally layered volume with a weak lateral ripple, identical on every
/// inline. Inlines are numbered from `inline_start`.
inline salttrack::SeismicVolume layered_volume(int inline_start, int inline_count, int width,
                                               int height) {
  salttrack::VolumeHeader h;
  h.inline_start = inline_start;
  h.inline_count = inline_count;
  h.crossline_start = 1;
  h.crossline_count = width;
  h.time_start_ms = 0;
  h.time_step_ms = 4;
  h.time_count = height;
  std::vector<float> s;
  s.reserve(h.sample_count());
  const double two_pi = 2.0 * std::numbers::pi;
  for (int il = 0; il < inline_count; ++il) {
    for (int x = 0; x < width; ++x) {
      for (int y = 0; y < height; ++y) {
        s.push_back(static_cast<float>(std::sin(two_pi * y / 7.0) + 0.2 * std::sin(two_pi * x / 13.0)));
      }
    }
  }
  return salttrack::SeismicVolume(h, std::move(s));
}

/// Straight reference boundary at time `y` over crosslines [x0, x1].
inline salttrack::BoundaryRecord flat_boundary(int inline_no, int x0, int x1, int y) {
  salttrack::BoundaryRecord r{inline_no, {}};
  for (int x = x0; x <= x1; ++x) r.points.push_back({x, y});
  return r;
}

/// Search mask that leaves exactly one admissible pixel per crossline,
/// cycling through time offsets 0, +jump, -jump around `y`. Every inline gets
/// the same pattern. A tracker restricted to it produces offsets that the
/// median filter rejects for about two thirds of the points.
inline salttrack::SeismicVolume zigzag_mask(const salttrack::VolumeHeader& like, int y, int jump) {
  salttrack::VolumeHeader h = like;
  std::vector<float> s(h.sample_count(), 0.0f);
  const int pattern[3] = {0, jump, -jump};
  for (int il = 0; il < h.inline_count; ++il) {
    for (int x = 0; x < h.crossline_count; ++x) {
      const int t = y + pattern[x % 3];
      if (t < 0 || t >= h.time_count) continue;
      s[(static_cast<std::size_t>(il) * h.crossline_count + x) * h.time_count + t] = 1.0f;
    }
  }
  return salttrack::SeismicVolume(h, std::move(s));
}

/// Small noise-free dome volume used by end-to-end tests.
inline salttrack::SynthSpec small_dome(int inline_start, int inline_count) {
  salttrack::SynthSpec spec;
  spec.inline_start = inline_start;
  spec.inline_count = inline_count;
  spec.crossline_count = 90;
  spec.time_count = 80;
  spec.center_x = 45;
  spec.center_y = 35;
  spec.radius_x = 20;
  spec.radius_y = 18;
  spec.flank_bottom = 60;
  spec.margin = 6;
  spec.drift = 0.0;
  spec.noise_sigma = 0.0;
  return spec;
}

}  // namespace fixtures
