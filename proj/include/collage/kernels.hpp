#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP version in
// collage::kernels (used by the library) and a plain serial version in
// collage::reference (kept for testing and benchmarking). Both produce
// bit-identical results for every input and thread count.

#include <cstdint>
#include <optional>
#include <vector>

#include "collage/image.hpp"

namespace collage {

// Inverse map from a destination pixel to a source coordinate for a cutout
// scaled by (sx, sy) and rotated by angle about its anchor, with the source
// anchor landing on dst_anchor. Both anchors are continuous coordinates.
struct AnchorWarp {
  Point2d src_anchor;
  Point2d dst_anchor;
  double cos_a = 1.0;
  double sin_a = 0.0;
  double sx = 1.0;
  double sy = 1.0;

  static AnchorWarp make(Point2d src_anchor, Point2d dst_anchor, double angle_deg,
                         double sx, double sy);

  Point2d to_source(int dst_x, int dst_y) const noexcept;
  Point2d to_dest(Point2d src) const noexcept;  // continuous forward map
};

// Exact cos/sin for multiples of 90 degrees; std::cos/std::sin otherwise.
void exact_cos_sin(double angle_deg, double& c, double& s) noexcept;

// Samples `src` at a continuous coordinate: alpha nearest-neighbour, RGB
// bilinear over opaque neighbours. Transparent result when the nearest pixel is
// outside or not opaque.
Rgba sample_cutout(const RgbaImage& src, Point2d at) noexcept;

struct PixelBox {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open
  bool empty() const noexcept { return x1 <= x0 || y1 <= y0; }
};

// Destination pixels the warped cutout can touch, clipped to a w x h frame.
PixelBox warp_bounds(const AnchorWarp& warp, int src_w, int src_h, int dst_w, int dst_h) noexcept;

// Joint histogram of (a label, b label) pairs. Rows index the distinct labels
// of a (row 0 = background), columns those of b.
struct OverlapTable {
  std::vector<Label> a_labels;  // sorted distinct nonzero labels of a
  std::vector<Label> b_labels;
  std::vector<std::int64_t> counts;  // (a_labels.size()+1) x (b_labels.size()+1)

  std::int64_t at(std::size_t ai, std::size_t bi) const noexcept {
    return counts[ai * (b_labels.size() + 1) + bi];
  }
  std::int64_t a_area(std::size_t ai) const noexcept;  // 1-based instance index
  std::int64_t b_area(std::size_t bi) const noexcept;

  friend bool operator==(const OverlapTable&, const OverlapTable&) = default;
};

std::vector<Label> distinct_labels(const LabelImage& labels);

namespace kernels {

// Writes the warped cutout into pixels/labels. Returns covered pixel count.
std::int64_t warp_paste(const RgbaImage& src, const AnchorWarp& warp, RgbImage& pixels,
                        LabelImage& labels, Label z);

// Renders the warped cutout into a fresh RGBA raster of the given size.
void warp_render(const RgbaImage& src, const AnchorWarp& warp, RgbaImage& dst);

OverlapTable overlap(const LabelImage& a, const LabelImage& b);

std::optional<Pixel> farthest_point(const Mask& mask, Point2d from);

}  // namespace kernels

namespace reference {

std::int64_t warp_paste(const RgbaImage& src, const AnchorWarp& warp, RgbImage& pixels,
                        LabelImage& labels, Label z);

void warp_render(const RgbaImage& src, const AnchorWarp& warp, RgbaImage& dst);

OverlapTable overlap(const LabelImage& a, const LabelImage& b);

std::optional<Pixel> farthest_point(const Mask& mask, Point2d from);

}  // namespace reference

}  // namespace collage
