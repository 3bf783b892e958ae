#pragma once

#include <algorithm>
#include <cassert>
#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace collage {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Rgba {
  std::uint8_t r = 0, g = 0, b = 0, a = 0;
  friend bool operator==(const Rgba&, const Rgba&) = default;

  Rgb rgb() const { return {r, g, b}; }
};

// Integer pixel index, x right and y down.
struct Pixel {
  int x = 0, y = 0;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

// Continuous image-plane coordinate. Pixel (i, j) covers [i, i+1) x [j, j+1),
// so its center sits at (i + 0.5, j + 0.5).
struct Point2d {
  double x = 0.0, y = 0.0;
  friend bool operator==(const Point2d&, const Point2d&) = default;
};

inline Point2d center_of(Pixel p) { return {p.x + 0.5, p.y + 0.5}; }

// Dense row-major raster.
template <class T>
class Image {
 public:
  using value_type = T;

  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    assert(width >= 0 && height >= 0);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t size() const noexcept { return data_.size(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  bool contains(Pixel p) const noexcept { return contains(p.x, p.y); }

  T& at(int x, int y) noexcept { return data_[index(x, y)]; }
  const T& at(int x, int y) const noexcept { return data_[index(x, y)]; }
  T& at(Pixel p) noexcept { return at(p.x, p.y); }
  const T& at(Pixel p) const noexcept { return at(p.x, p.y); }

  std::span<T> row(int y) noexcept {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }
  std::span<const T> row(int y) const noexcept {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    assert(contains(x, y));
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Label = std::uint16_t;

using RgbImage = Image<Rgb>;
using RgbaImage = Image<Rgba>;
using LabelImage = Image<Label>;
using Mask = Image<std::uint8_t>;  // 0 = off, anything else = on

inline constexpr std::uint8_t kAlphaOpaque = 255;
// Alpha above half intensity counts as leaf; resampled edges are binarized here.
inline constexpr std::uint8_t kAlphaThreshold = 127;

inline bool is_opaque(const Rgba& p) noexcept { return p.a > kAlphaThreshold; }

Mask alpha_mask(const RgbaImage& img);
Mask foreground(const LabelImage& labels);
std::size_t count_on(const Mask& mask);

template <class A, class B>
bool same_shape(const Image<A>& a, const Image<B>& b) {
  return a.width() == b.width() && a.height() == b.height();
}

}  // namespace collage
