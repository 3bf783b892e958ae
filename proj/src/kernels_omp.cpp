#include <omp.h>

#include <algorithm>

#include "collage/error.hpp"
#include "collage/kernels.hpp"
#include "overlap_index.hpp"

namespace collage::kernels {

std::int64_t warp_paste(const RgbaImage& src, const AnchorWarp& warp, RgbImage& pixels,
                        LabelImage& labels, Label z) {
  const PixelBox box = warp_bounds(warp, src.width(), src.height(), pixels.width(), pixels.height());
  if (box.empty()) return 0;
  std::int64_t covered = 0;

#pragma omp parallel for schedule(static) reduction(+ : covered)
  for (int y = box.y0; y < box.y1; ++y) {
    auto out_rgb = pixels.row(y);
    auto out_lbl = labels.row(y);
    for (int x = box.x0; x < box.x1; ++x) {
      const Rgba p = sample_cutout(src, warp.to_source(x, y));
      if (p.a == 0) continue;
      out_rgb[x] = p.rgb();
      out_lbl[x] = z;
      ++covered;
    }
  }
  return covered;
}

void warp_render(const RgbaImage& src, const AnchorWarp& warp, RgbaImage& dst) {
  const int h = dst.height();
  const int w = dst.width();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    auto out = dst.row(y);
    for (int x = 0; x < w; ++x) out[x] = sample_cutout(src, warp.to_source(x, y));
  }
}

OverlapTable overlap(const LabelImage& a, const LabelImage& b) {
  if (!same_shape(a, b)) fail(Errc::invalid_input, "overlap: label rasters differ in size");
  const detail::OverlapIndex index(a, b);
  OverlapTable table = index.empty_table();
  const std::size_t cols = table.b_labels.size() + 1;
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  const auto n = static_cast<std::ptrdiff_t>(pa.size());

#pragma omp parallel
  {
    std::vector<std::int64_t> local(table.counts.size(), 0);
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      ++local[index.a_slot(pa[i]) * cols + index.b_slot(pb[i])];
    }
#pragma omp critical(collage_overlap_merge)
    for (std::size_t k = 0; k < local.size(); ++k) table.counts[k] += local[k];
  }
  return table;
}

std::optional<Pixel> farthest_point(const Mask& mask, Point2d from) {
  struct RowBest {
    double d2 = -1.0;
    int x = -1;
  };
  const int h = mask.height();
  const int w = mask.width();
  std::vector<RowBest> best(static_cast<std::size_t>(h));

#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    const auto row = mask.row(y);
    const double dy = y - from.y;
    RowBest rb;
    for (int x = 0; x < w; ++x) {
      if (row[x] == 0) continue;
      const double dx = x - from.x;
      const double d2 = dx * dx + dy * dy;
      if (d2 > rb.d2) rb = {d2, x};
    }
    best[static_cast<std::size_t>(y)] = rb;
  }

  std::optional<Pixel> result;
  double top = -1.0;
  for (int y = 0; y < h; ++y) {
    const RowBest& rb = best[static_cast<std::size_t>(y)];
    if (rb.x >= 0 && rb.d2 > top) {
      top = rb.d2;
      result = Pixel{rb.x, y};
    }
  }
  return result;
}

}  // namespace collage::kernels
