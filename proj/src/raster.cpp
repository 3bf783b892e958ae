#include "collage/raster.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "collage/error.hpp"
#include "collage/kernels.hpp"
#include "collage/leafbank.hpp"

namespace collage {

Scene Scene::from_background(const RgbImage& background) {
  Scene s;
  s.pixels = background;
  s.labels = LabelImage(background.width(), background.height(), 0);
  s.next_z = 0;
  return s;
}

double wrap_degrees(double deg) noexcept {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r -= 360.0;
  return r;
}

double direction_deg(Point2d from, Point2d to) noexcept {
  const double dx = to.x - from.x;
  const double dy = from.y - to.y;  // flip so that "up" is positive
  return wrap_degrees(std::atan2(dy, dx) * (180.0 / M_PI));
}

namespace {

// Removes floating noise from bounds that should land on pixel edges.
double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < 1e-9 ? r : v;
}

}  // namespace

Rotated rotate(const RgbaImage& src, double angle_deg, Point2d pivot) {
  if (!std::isfinite(angle_deg)) fail(Errc::invalid_input, "rotate: angle is not finite");
  if (src.empty()) return {src, pivot};

  const AnchorWarp probe = AnchorWarp::make(pivot, pivot, angle_deg, 1.0, 1.0);
  const Point2d corners[4] = {
      probe.to_dest({0.0, 0.0}),
      probe.to_dest({static_cast<double>(src.width()), 0.0}),
      probe.to_dest({0.0, static_cast<double>(src.height())}),
      probe.to_dest({static_cast<double>(src.width()), static_cast<double>(src.height())}),
  };
  double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
  double min_y = min_x, max_y = -min_x;
  for (const auto& c : corners) {
    min_x = std::min(min_x, snap(c.x));
    max_x = std::max(max_x, snap(c.x));
    min_y = std::min(min_y, snap(c.y));
    max_y = std::max(max_y, snap(c.y));
  }
  const double x0 = std::floor(min_x);
  const double y0 = std::floor(min_y);
  const int w = static_cast<int>(std::ceil(max_x) - x0);
  const int h = static_cast<int>(std::ceil(max_y) - y0);

  Rotated out;
  out.pivot = {pivot.x - x0, pivot.y - y0};
  out.image = RgbaImage(w, h);
  kernels::warp_render(src, AnchorWarp::make(pivot, out.pivot, angle_deg, 1.0, 1.0), out.image);
  return out;
}

RgbaImage scale(const RgbaImage& src, double sx, double sy) {
  if (!(sx > 0.0 && sx <= 16.0 && sy > 0.0 && sy <= 16.0)) {
    fail(Errc::degenerate_scale, "scale: factors must lie in (0, 16]");
  }
  const long w = std::lround(src.width() * sx);
  const long h = std::lround(src.height() * sy);
  if (w <= 0 || h <= 0) fail(Errc::degenerate_scale, "scale: result has a zero dimension");

  RgbaImage out(static_cast<int>(w), static_cast<int>(h));
  // Exact edge-to-edge ratio so the outer pixel edges map onto each other.
  const double rx = static_cast<double>(w) / src.width();
  const double ry = static_cast<double>(h) / src.height();
  kernels::warp_render(src, AnchorWarp::make({0.0, 0.0}, {0.0, 0.0}, 0.0, rx, ry), out);
  return out;
}

void composite_leaf(Scene& scene, const LeafCutout& cutout, const Placement& p) {
  if (p.z != scene.next_z + 1) {
    fail(Errc::contract_violation, "composite_leaf: placement z must be next_z + 1");
  }
  if (p.z > std::numeric_limits<Label>::max()) {
    fail(Errc::contract_violation, "composite_leaf: more placements than 16-bit labels allow");
  }
  if (!scene.pixels.contains(p.position)) {
    fail(Errc::invalid_placement, "composite_leaf: anchor position outside the scene");
  }
  if (!(p.scale_x > 0.0 && p.scale_y > 0.0)) {
    fail(Errc::degenerate_scale, "composite_leaf: scales must be positive");
  }
  const AnchorWarp warp = AnchorWarp::make(center_of(cutout.anchor), center_of(p.position),
                                           p.angle_deg, p.scale_x, p.scale_y);
  kernels::warp_paste(cutout.pixels, warp, scene.pixels, scene.labels, static_cast<Label>(p.z));
  scene.next_z = p.z;
}

Components connected_components(const Mask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  Components out;
  out.labels = Image<std::int32_t>(w, h, 0);

  // Provisional labels with union-find, then renumber in scan order.
  std::vector<std::int32_t> parent{0};
  const auto find = [&parent](std::int32_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask.at(x, y) == 0) continue;
      const std::int32_t left = x > 0 ? out.labels.at(x - 1, y) : 0;
      const std::int32_t up = y > 0 ? out.labels.at(x, y - 1) : 0;
      std::int32_t label;
      if (left == 0 && up == 0) {
        label = static_cast<std::int32_t>(parent.size());
        parent.push_back(label);
      } else if (left != 0 && up != 0) {
        const std::int32_t a = find(left);
        const std::int32_t b = find(up);
        label = std::min(a, b);
        parent[std::max(a, b)] = label;
      } else {
        label = left != 0 ? left : up;
      }
      out.labels.at(x, y) = label;
    }
  }

  std::vector<std::int32_t> final_label(parent.size(), 0);
  for (auto& v : out.labels.pixels()) {
    if (v == 0) continue;
    const std::int32_t root = find(v);
    if (final_label[root] == 0) final_label[root] = ++out.count;
    v = final_label[root];
  }
  return out;
}

Pixel farthest_point(const Mask& mask, Point2d from) {
  const auto p = kernels::farthest_point(mask, from);
  if (!p) fail(Errc::degenerate_mask, "farthest_point: mask is empty");
  return *p;
}

Pixel nearest_point(const Mask& mask, Point2d from) {
  std::optional<Pixel> result;
  double best = std::numeric_limits<double>::infinity();
  for (int y = 0; y < mask.height(); ++y) {
    const auto row = mask.row(y);
    for (int x = 0; x < mask.width(); ++x) {
      if (row[x] == 0) continue;
      const double dx = x - from.x;
      const double dy = y - from.y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        result = Pixel{x, y};
      }
    }
  }
  if (!result) fail(Errc::degenerate_mask, "nearest_point: mask is empty");
  return *result;
}

}  // namespace collage
