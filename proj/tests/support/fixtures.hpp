#pragma once

// Synthetic annotated plants for tests. Leaves are ellipses radiating from a
// plant center, painted in order so later leaves occlude earlier ones.

#include <cstdint>
#include <vector>

#include "collage/leafbank.hpp"
#include "collage/rng.hpp"
#include "collage/synth.hpp"

namespace collage::testing {

struct LeafShape {
  double direction_deg = 90.0;  // counterclockwise from +x, screen up = 90
  double base_dist = 4.0;       // gap between plant center and leaf base
  double length = 40.0;
  double width = 16.0;
};

struct RosetteSpec {
  int width = 128;
  int height = 128;
  Pixel center{64, 64};
  std::vector<LeafShape> leaves;
  std::uint64_t texture_seed = 1;
};

// Leaf k (1-based) gets label k. Background pixels are soil-coloured.
AnnotatedImage make_rosette(const RosetteSpec& layout, std::string source_id = "plant");

// Rosette with n leaves following a rough 137.5 degree spiral with random
// sizes; neighbouring leaves overlap so some are occluded.
RosetteSpec random_rosette(CounterRng& rng, int width, int height, int n_leaves);

// 100x100 image with center (50,50): label 1 is a clean leaf, 2 has two
// components, 3 has 9 px, 4 sits far from the center, 5 has 6% of its
// boundary touching label 6, and 6 is a single pixel.
AnnotatedImage make_filter_fixture();

RgbImage make_background(int width, int height, std::uint64_t seed);

// Structured bank built from `images` random rosettes sized for the subset.
LeafBank make_structured_bank(SubsetTag tag, int images, std::uint64_t seed);

// Naive bank prescaled to `longest` px.
LeafBank make_naive_bank(int images, std::uint64_t seed, int longest = 600);

std::vector<Background> make_backgrounds(int count, int width, int height, std::uint64_t seed);

// Random label raster with labels drawn from {0..max_label}.
LabelImage random_labels(CounterRng& rng, int width, int height, int max_label);

Mask random_mask(CounterRng& rng, int width, int height, double density);

}  // namespace collage::testing
