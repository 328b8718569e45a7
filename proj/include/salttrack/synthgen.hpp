#pragma once

#include <cstdint>
#include <vector>

#include "salttrack/grid.hpp"
#include "salttrack/volume_io.hpp"

namespace salttrack {

/// Synthetic salt-dome volume description. The dome is the upper half of an
/// ellipse continued by vertical flanks down to `flank_bottom`; its center
/// moves `drift` crosslines per inline relative to the middle inline.
struct SynthSpec {
  int inline_start = 389;
  int inline_count = 21;
  int crossline_start = 401;
  int crossline_count = 200;
  int time_start_ms = 1300;
  int time_step_ms = 4;
  int time_count = 160;

  double center_x = 100.0;  // at the middle inline
  double center_y = 85.0;
  double radius_x = 45.0;
  double radius_y = 50.0;
  int flank_bottom = 140;
  double drift = 1.0;  // crosslines per inline

  double layer_period = 9.0;    // samples per stratum cycle
  double layer_dip = 0.0;       // time shift per crossline (0: horizontal strata)
  double interior_level = 0.0;  // mean salt amplitude
  double interior_ripple = 0.04;
  double boundary_reflection = 1.5;  // interface reflector amplitude
  double reflection_width = 1.5;     // e-folding distance in samples
  double noise_sigma = 0.08;
  std::uint64_t seed = 20150927;

  int margin = 15;  // half patch; the boundary must keep this clearance

  /// Throws Error(usage) when the dome leaves the margin on any inline.
  void validate() const;
  int middle_inline() const { return inline_start + inline_count / 2; }
};

struct SynthResult {
  SeismicVolume volume;
  std::vector<BoundaryRecord> truth;  // one per inline, traversal order
};

/// SplitMix64 finalizer; the generator draws value k of a stream as
/// splitmix64(seed + k * 0x9E3779B97F4A7C15).
std::uint64_t splitmix64(std::uint64_t x);

/// Uniform in (0,1) from 53 random bits of the counter-based stream.
double counter_uniform(std::uint64_t seed, std::uint64_t counter);

/// Standard normal via Box-Muller on two consecutive counter draws.
double counter_gaussian(std::uint64_t seed, std::uint64_t counter);

/// Thin, ordered ground-truth boundary of one inline (index 0-based).
std::vector<Point> dome_boundary(const SynthSpec& spec, int inline_index);

/// Salt mask of one inline: every column below its top-most boundary pixel.
Grid2D<unsigned char> dome_mask(const SynthSpec& spec, int inline_index);

SynthResult generate(const SynthSpec& spec);

}  // namespace salttrack
