#include "collage/error.hpp"
#include "collage/kernels.hpp"
#include "overlap_index.hpp"

namespace collage::reference {

// Scans the whole destination; no bounding box.
std::int64_t warp_paste(const RgbaImage& src, const AnchorWarp& warp, RgbImage& pixels,
                        LabelImage& labels, Label z) {
  std::int64_t covered = 0;
  for (int y = 0; y < pixels.height(); ++y) {
    for (int x = 0; x < pixels.width(); ++x) {
      const Rgba p = sample_cutout(src, warp.to_source(x, y));
      if (p.a == 0) continue;
      pixels.at(x, y) = p.rgb();
      labels.at(x, y) = z;
      ++covered;
    }
  }
  return covered;
}

void warp_render(const RgbaImage& src, const AnchorWarp& warp, RgbaImage& dst) {
  for (int y = 0; y < dst.height(); ++y) {
    for (int x = 0; x < dst.width(); ++x) dst.at(x, y) = sample_cutout(src, warp.to_source(x, y));
  }
}

OverlapTable overlap(const LabelImage& a, const LabelImage& b) {
  if (!same_shape(a, b)) fail(Errc::invalid_input, "overlap: label rasters differ in size");
  const detail::OverlapIndex index(a, b);
  OverlapTable table = index.empty_table();
  const std::size_t cols = table.b_labels.size() + 1;
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    ++table.counts[index.a_slot(pa[i]) * cols + index.b_slot(pb[i])];
  }
  return table;
}

std::optional<Pixel> farthest_point(const Mask& mask, Point2d from) {
  std::optional<Pixel> result;
  double top = -1.0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y) == 0) continue;
      const double dx = x - from.x;
      const double dy = y - from.y;
      const double d2 = dx * dx + dy * dy;
      if (d2 > top) {
        top = d2;
        result = Pixel{x, y};
      }
    }
  }
  return result;
}

}  // namespace collage::reference
