#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace collage::testing {

AnnotatedImage make_rosette(const RosetteSpec& layout, std::string source_id) {
  AnnotatedImage img;
  img.source_id = std::move(source_id);
  img.pixels = RgbImage(layout.width, layout.height);
  img.labels = LabelImage(layout.width, layout.height, 0);
  img.plant_center = layout.center;

  CounterRng tex(layout.texture_seed, 0);
  for (auto& p : img.pixels.pixels()) {
    const auto n = static_cast<std::uint8_t>(tex.uniform_int(0, 30));
    p = {static_cast<std::uint8_t>(90 + n), static_cast<std::uint8_t>(70 + n / 2), static_cast<std::uint8_t>(50 + n / 3)};
  }

  for (std::size_t k = 0; k < layout.leaves.size(); ++k) {
    const LeafShape& leaf = layout.leaves[k];
    const double rad = leaf.direction_deg * M_PI / 180.0;
    const double dx = std::cos(rad), dy = -std::sin(rad);
    const double half_len = leaf.length / 2.0, half_w = leaf.width / 2.0;
    const double mid = leaf.base_dist + half_len;
    const auto label = static_cast<Label>(k + 1);
    for (int y = 0; y < layout.height; ++y) {
      for (int x = 0; x < layout.width; ++x) {
        const double rx = x - layout.center.x;
        const double ry = y - layout.center.y;
        const double u = rx * dx + ry * dy;
        const double v = -rx * dy + ry * dx;
        const double a = (u - mid) / half_len;
        const double b = v / half_w;
        if (a * a + b * b > 1.0) continue;
        img.labels.at(x, y) = label;
        const double t = std::clamp(u / (mid + half_len), 0.0, 1.0);
        img.pixels.at(x, y) = {static_cast<std::uint8_t>(30 + 15 * (k % 4)),
                               static_cast<std::uint8_t>(110 + 110 * t),
                               static_cast<std::uint8_t>(40 + 40 * std::abs(b))};
      }
    }
  }
  return img;
}

RosetteSpec random_rosette(CounterRng& rng, int width, int height, int n_leaves) {
  RosetteSpec layout;
  layout.width = width;
  layout.height = height;
  const int side = std::min(width, height);
  layout.center = {width / 2 + static_cast<int>(rng.uniform_int(-side / 20, side / 20)),
                 height / 2 + static_cast<int>(rng.uniform_int(-side / 20, side / 20))};
  layout.texture_seed = rng.next_u64();
  double dir = rng.uniform(0.0, 360.0);
  for (int k = 0; k < n_leaves; ++k) {
    LeafShape leaf;
    leaf.direction_deg = dir;
    leaf.length = side * rng.uniform(0.15, 0.33);
    leaf.width = leaf.length * rng.uniform(0.25, 0.5);
    leaf.base_dist = rng.uniform(side * 0.01, side * 0.07);
    layout.leaves.push_back(leaf);
    dir = std::fmod(dir + 360.0 / n_leaves + rng.uniform(-12.0, 12.0), 360.0);
  }
  return layout;
}

namespace {

void paint_rect(AnnotatedImage& img, Label l, int x0, int y0, int x1, int y1) {
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      img.labels.at(x, y) = l;
      img.pixels.at(x, y) = {static_cast<std::uint8_t>(10 * l), static_cast<std::uint8_t>(x),
                             static_cast<std::uint8_t>(y)};
    }
  }
}

}  // namespace

AnnotatedImage make_filter_fixture() {
  AnnotatedImage img;
  img.pixels = RgbImage(100, 100, Rgb{50, 60, 70});
  img.labels = LabelImage(100, 100, 0);
  img.plant_center = Pixel{50, 50};
  img.source_id = "s";
  paint_rect(img, 1, 52, 30, 58, 49);
  paint_rect(img, 2, 30, 52, 36, 60);
  paint_rect(img, 2, 30, 64, 36, 70);
  paint_rect(img, 3, 48, 52, 50, 54);
  // Base ~49 px away; the limit is 0.15 * 141 = 21.
  paint_rect(img, 4, 85, 85, 97, 97);
  // The 17x10 block has 50 boundary pixels; one foreign pixel beside the
  // left edge touches 3 of them.
  paint_rect(img, 5, 62, 55, 78, 64);
  paint_rect(img, 6, 61, 60, 61, 60);
  return img;
}

RgbImage make_background(int width, int height, std::uint64_t seed) {
  RgbImage img(width, height);
  CounterRng rng(seed, 7);
  const int cell = 8;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto n = static_cast<std::uint8_t>(((x / cell) * 31 + (y / cell) * 17 + seed * 13) % 40);
      img.at(x, y) = {static_cast<std::uint8_t>(100 + n), static_cast<std::uint8_t>(80 + n / 2),
                      static_cast<std::uint8_t>(60 + n / 4)};
    }
  }
  // A few speckles so crops differ.
  for (int i = 0; i < width * height / 64; ++i) {
    const auto x = static_cast<int>(rng.uniform_int(0, width - 1));
    const auto y = static_cast<int>(rng.uniform_int(0, height - 1));
    img.at(x, y) = {200, 190, 170};
  }
  return img;
}

namespace {

std::pair<int, int> original_size(SubsetTag tag) {
  switch (tag) {
    case SubsetTag::A1: return {530, 500};
    case SubsetTag::A2: return {530, 565};
    case SubsetTag::A3: return {2448, 2048};
    case SubsetTag::A4: return {441, 441};
    case SubsetTag::custom: break;
  }
  return {160, 160};
}

}  // namespace

LeafBank make_structured_bank(SubsetTag tag, int images, std::uint64_t seed) {
  const auto [w, h] = original_size(tag);
  CounterRng rng(seed, static_cast<std::uint64_t>(tag));
  std::vector<AnnotatedImage> sources;
  for (int i = 0; i < images; ++i) {
    AnnotatedImage img = make_rosette(random_rosette(rng, w, h, 6), "src" + std::to_string(i));
    img.subset = tag;
    sources.push_back(std::move(img));
  }
  BankOptions opts;
  opts.kind = BankKind::structured;
  return build_bank(sources, opts);
}

LeafBank make_naive_bank(int images, std::uint64_t seed, int longest) {
  CounterRng rng(seed, 99);
  std::vector<AnnotatedImage> sources;
  for (int i = 0; i < images; ++i) {
    sources.push_back(make_rosette(random_rosette(rng, 400, 400, 5), "avo" + std::to_string(i)));
  }
  BankOptions opts;
  opts.kind = BankKind::naive;
  opts.prescale_longest_dim = longest;
  return build_bank(sources, opts);
}

std::vector<Background> make_backgrounds(int count, int width, int height, std::uint64_t seed) {
  std::vector<Background> out;
  for (int i = 0; i < count; ++i) {
    out.push_back({"bg" + std::to_string(i), make_background(width, height, seed + static_cast<std::uint64_t>(i))});
  }
  return out;
}

LabelImage random_labels(CounterRng& rng, int width, int height, int max_label) {
  LabelImage img(width, height);
  for (auto& v : img.pixels()) v = static_cast<Label>(rng.uniform_int(0, max_label));
  return img;
}

Mask random_mask(CounterRng& rng, int width, int height, double density) {
  Mask m(width, height);
  for (auto& v : m.pixels()) v = rng.uniform01() < density ? 1 : 0;
  return m;
}

}  // namespace collage::testing
