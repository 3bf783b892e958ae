#pragma once

#include <cstdint>
#include <string>

#include "collage/image.hpp"

namespace collage {

struct LeafCutout;

// Output labels of a scene under construction. Every nonzero label is the z of
// the placement that last covered that pixel.
struct Scene {
  RgbImage pixels;
  LabelImage labels;
  int next_z = 0;

  static Scene from_background(const RgbImage& background);
};

struct Placement {
  std::string leaf_id;
  Pixel position;          // where the cutout anchor lands
  double angle_deg = 0.0;  // counterclockwise (as seen on screen), about the anchor
  double scale_x = 1.0;
  double scale_y = 1.0;
  int z = 1;

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct Rotated {
  RgbaImage image;
  Point2d pivot;  // where the input pivot lands in `image`
};

// Wraps an angle into [0, 360).
double wrap_degrees(double deg) noexcept;

// Angle of the vector from `from` to `to` in degrees, [0, 360). Image rows grow
// downward, so a target directly above `from` is at 90 degrees.
double direction_deg(Point2d from, Point2d to) noexcept;

// Rotation about `pivot`, bounds grown to hold the result. Alpha is sampled
// nearest-neighbour (stays binary), RGB bilinearly over opaque neighbours.
Rotated rotate(const RgbaImage& src, double angle_deg, Point2d pivot);

// Anisotropic resize to round(w*sx) x round(h*sy). Requires 0 < sx, sy <= 16.
RgbaImage scale(const RgbaImage& src, double sx, double sy);

// Pastes `cutout` into `scene` as placement `p` (operator T_z): scale, rotate
// about the anchor, translate the anchor onto p.position. Pixels whose
// resampled alpha is above half are written and labelled p.z; everything is
// clipped at the scene border. p.z must equal scene.next_z + 1.
void composite_leaf(Scene& scene, const LeafCutout& cutout, const Placement& p);

struct Components {
  Image<std::int32_t> labels;  // 0 = off, 1..count in raster-scan order of first pixel
  int count = 0;
};

// 4-connected component labelling.
Components connected_components(const Mask& mask);

// Mask pixel with the greatest Euclidean distance from `from` (pixel index
// coordinates). Ties go to the smallest row, then the smallest column.
Pixel farthest_point(const Mask& mask, Point2d from);

// Mask pixel nearest to `from`; same tie rule.
Pixel nearest_point(const Mask& mask, Point2d from);

}  // namespace collage
