#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace salttrack {

/// Integer pixel position inside a section: x runs along crosslines, y along
/// time (downwards).
struct Point {
  int x = 0;
  int y = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Real-valued 2D position used for geometry on continuous curves.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Dense 2D grid indexed (x, y). Storage is x-major with y varying fastest,
/// which matches the trace layout of a volume inline slice.
template <typename T>
class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(int width, int height, T fill = T{})
      : width_(width),
        height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
              fill) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  bool contains(Point p) const noexcept { return contains(p.x, p.y); }

  T& operator()(int x, int y) {
    assert(contains(x, y));
    return data_[index(x, y)];
  }
  const T& operator()(int x, int y) const {
    assert(contains(x, y));
    return data_[index(x, y)];
  }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(height_) +
           static_cast<std::size_t>(y);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

}  // namespace salttrack
