#include "salttrack/render.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "salttrack/error.hpp"

namespace salttrack {

Rgb parse_color(const std::string& text) {
  static const std::map<std::string, Rgb> named{
      {"red", {255, 0, 0}},      {"green", {0, 200, 0}},    {"blue", {0, 80, 255}},
      {"yellow", {255, 220, 0}}, {"cyan", {0, 220, 220}},   {"magenta", {230, 0, 230}},
      {"white", {255, 255, 255}}, {"black", {0, 0, 0}},     {"orange", {255, 140, 0}},
  };
  if (auto it = named.find(text); it != named.end()) return it->second;
  if (text.size() == 7 && text[0] == '#' &&
      std::all_of(text.begin() + 1, text.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); })) {
    const auto byte = [&](int pos) {
      return static_cast<std::uint8_t>(std::stoi(text.substr(static_cast<std::size_t>(pos), 2), nullptr, 16));
    };
    return {byte(1), byte(3), byte(5)};
  }
  fail(ErrorKind::usage, "unrecognized color '" + text + "'");
}

Rgb Image::at(int x, int y) const {
  const std::size_t i = 3u * (static_cast<std::size_t>(y) * width_ + x);
  return {rgb_[i], rgb_[i + 1], rgb_[i + 2]};
}

void Image::set(int x, int y, Rgb c) {
  const std::size_t i = 3u * (static_cast<std::size_t>(y) * width_ + x);
  rgb_[i] = c.r;
  rgb_[i + 1] = c.g;
  rgb_[i + 2] = c.b;
}

Image render_gray(const Grid2D<double>& unit_values) {
  Image img(unit_values.width(), unit_values.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double v = std::clamp(unit_values(x, y), 0.0, 1.0);
      const auto g = static_cast<std::uint8_t>(std::lround(255.0 * v));
      img.set(x, y, {g, g, g});
    }
  }
  return img;
}

void burn_curve(Image& image, const BoundaryCurve& curve, Rgb color) {
  for (const Point& p : curve.points) {
    if (p.x >= 0 && p.y >= 0 && p.x < image.width() && p.y < image.height()) {
      image.set(p.x, p.y, color);
    }
  }
}

std::string encode_ppm(const Image& image) {
  std::string out = "P6\n" + std::to_string(image.width()) + " " +
                    std::to_string(image.height()) + "\n255\n";
  const auto bytes = image.bytes();
  out.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  return out;
}

void save_ppm(const std::filesystem::path& path, const Image& image) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::data, "cannot write " + path.string());
  const std::string data = encode_ppm(image);
  f.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!f) fail(ErrorKind::data, "write failed: " + path.string());
}

std::string svg_overlay(int width, int height, std::span<const ColoredCurve> curves) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  for (const auto& c : curves) {
    char hex[8];
    std::snprintf(hex, sizeof hex, "#%02x%02x%02x", c.color.r, c.color.g, c.color.b);
    s << "  <polyline fill=\"none\" stroke=\"" << hex << "\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < c.curve.points.size(); ++i) {
      if (i > 0) s << ' ';
      s << c.curve.points[i].x << ',' << c.curve.points[i].y;
    }
    s << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace salttrack
