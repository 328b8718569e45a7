#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "salttrack/boundary.hpp"
#include "salttrack/grid.hpp"

namespace salttrack {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Accepts "#rrggbb" or one of: red, green, blue, yellow, cyan, magenta,
/// white, black, orange. Throws Error(usage) otherwise.
Rgb parse_color(const std::string& text);

/// Row-major RGB raster; x runs along crossline, y along time.
class Image {
 public:
  Image(int width, int height) : width_(width), height_(height), rgb_(3u * width * height, 0) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);
  std::span<const std::uint8_t> bytes() const noexcept { return rgb_; }

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> rgb_;
};

/// Gray image of a grid whose values lie in [0,1]; values are clamped and
/// mapped to round(255 v).
Image render_gray(const Grid2D<double>& unit_values);

/// Paints every curve pixel that falls inside the image.
void burn_curve(Image& image, const BoundaryCurve& curve, Rgb color);

/// Binary PPM (P6) bytes.
std::string encode_ppm(const Image& image);
void save_ppm(const std::filesystem::path& path, const Image& image);

struct ColoredCurve {
  BoundaryCurve curve;
  Rgb color;
};

/// Minimal SVG with one polyline per curve, in pixel coordinates.
std::string svg_overlay(int width, int height, std::span<const ColoredCurve> curves);

}  // namespace salttrack
