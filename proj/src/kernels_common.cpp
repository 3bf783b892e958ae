#include <algorithm>
#include <cmath>

#include "collage/kernels.hpp"

namespace collage {

void exact_cos_sin(double angle_deg, double& c, double& s) noexcept {
  const double wrapped = std::fmod(angle_deg, 360.0);
  if (std::fmod(wrapped, 90.0) == 0.0) {
    const int quarter = ((static_cast<int>(wrapped / 90.0) % 4) + 4) % 4;
    static constexpr double kCos[4] = {1.0, 0.0, -1.0, 0.0};
    static constexpr double kSin[4] = {0.0, 1.0, 0.0, -1.0};
    c = kCos[quarter];
    s = kSin[quarter];
    return;
  }
  const double rad = wrapped * (M_PI / 180.0);
  c = std::cos(rad);
  s = std::sin(rad);
}

AnchorWarp AnchorWarp::make(Point2d src_anchor, Point2d dst_anchor, double angle_deg, double sx,
                            double sy) {
  AnchorWarp w;
  w.src_anchor = src_anchor;
  w.dst_anchor = dst_anchor;
  exact_cos_sin(angle_deg, w.cos_a, w.sin_a);
  w.sx = sx;
  w.sy = sy;
  return w;
}

// Forward rotation in image coordinates (y down) that turns content
// counterclockwise on screen:
//   x' =  c*dx + s*dy
//   y' = -s*dx + c*dy
Point2d AnchorWarp::to_source(int dst_x, int dst_y) const noexcept {
  const double dx = (dst_x + 0.5) - dst_anchor.x;
  const double dy = (dst_y + 0.5) - dst_anchor.y;
  const double ux = cos_a * dx - sin_a * dy;
  const double uy = sin_a * dx + cos_a * dy;
  return {src_anchor.x + ux / sx, src_anchor.y + uy / sy};
}

Point2d AnchorWarp::to_dest(Point2d src) const noexcept {
  const double ox = (src.x - src_anchor.x) * sx;
  const double oy = (src.y - src_anchor.y) * sy;
  return {dst_anchor.x + cos_a * ox + sin_a * oy, dst_anchor.y - sin_a * ox + cos_a * oy};
}

Rgba sample_cutout(const RgbaImage& src, Point2d at) noexcept {
  const double fxn = std::floor(at.x);
  const double fyn = std::floor(at.y);
  if (fxn < 0.0 || fyn < 0.0 || fxn >= src.width() || fyn >= src.height()) return {};
  const int ix = static_cast<int>(fxn);
  const int iy = static_cast<int>(fyn);
  if (!is_opaque(src.at(ix, iy))) return {};

  const double u = at.x - 0.5;
  const double v = at.y - 0.5;
  const double x0f = std::floor(u);
  const double y0f = std::floor(v);
  const double fx = u - x0f;
  const double fy = v - y0f;
  const int x0 = static_cast<int>(x0f);
  const int y0 = static_cast<int>(y0f);

  double acc_r = 0.0, acc_g = 0.0, acc_b = 0.0, wsum = 0.0;
  const double wx[2] = {1.0 - fx, fx};
  const double wy[2] = {1.0 - fy, fy};
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 2; ++i) {
      const int x = x0 + i;
      const int y = y0 + j;
      const double w = wx[i] * wy[j];
      if (w <= 0.0 || !src.contains(x, y)) continue;
      const Rgba& p = src.at(x, y);
      if (!is_opaque(p)) continue;
      acc_r += w * p.r;
      acc_g += w * p.g;
      acc_b += w * p.b;
      wsum += w;
    }
  }
  const auto channel = [wsum](double acc) {
    const double value = std::floor(acc / wsum + 0.5);
    return static_cast<std::uint8_t>(std::clamp(value, 0.0, 255.0));
  };
  return {channel(acc_r), channel(acc_g), channel(acc_b), kAlphaOpaque};
}

PixelBox warp_bounds(const AnchorWarp& warp, int src_w, int src_h, int dst_w, int dst_h) noexcept {
  const Point2d corners[4] = {
      warp.to_dest({0.0, 0.0}),
      warp.to_dest({static_cast<double>(src_w), 0.0}),
      warp.to_dest({0.0, static_cast<double>(src_h)}),
      warp.to_dest({static_cast<double>(src_w), static_cast<double>(src_h)}),
  };
  double min_x = corners[0].x, max_x = corners[0].x;
  double min_y = corners[0].y, max_y = corners[0].y;
  for (const auto& c : corners) {
    min_x = std::min(min_x, c.x);
    max_x = std::max(max_x, c.x);
    min_y = std::min(min_y, c.y);
    max_y = std::max(max_y, c.y);
  }
  // One pixel of slack absorbs rounding in the corner transform.
  const auto lo = [](double v, int limit) {
    return static_cast<int>(std::clamp(std::floor(v) - 1.0, 0.0, static_cast<double>(limit)));
  };
  const auto hi = [](double v, int limit) {
    return static_cast<int>(std::clamp(std::ceil(v) + 1.0, 0.0, static_cast<double>(limit)));
  };
  return {lo(min_x, dst_w), lo(min_y, dst_h), hi(max_x, dst_w), hi(max_y, dst_h)};
}

std::int64_t OverlapTable::a_area(std::size_t ai) const noexcept {
  std::int64_t sum = 0;
  for (std::size_t bi = 0; bi <= b_labels.size(); ++bi) sum += at(ai, bi);
  return sum;
}

std::int64_t OverlapTable::b_area(std::size_t bi) const noexcept {
  std::int64_t sum = 0;
  for (std::size_t ai = 0; ai <= a_labels.size(); ++ai) sum += at(ai, bi);
  return sum;
}

std::vector<Label> distinct_labels(const LabelImage& labels) {
  std::vector<bool> seen(65536, false);
  for (Label l : labels.pixels()) seen[l] = true;
  std::vector<Label> out;
  for (std::size_t v = 1; v < seen.size(); ++v) {
    if (seen[v]) out.push_back(static_cast<Label>(v));
  }
  return out;
}

}  // namespace collage
