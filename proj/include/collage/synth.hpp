#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "collage/leafbank.hpp"
#include "collage/raster.hpp"
#include "collage/rng.hpp"

namespace collage {

// Angular step between consecutive leaves. Inside a triad the step is
// within_mean +- within_jitter; the first leaf of triad t >= 2 steps by
// (offset_base +- offset_jitter) / 2^(t-2).
struct AngleSchedule {
  double within_mean = 127.5;
  double within_jitter = 12.5;
  double offset_base = 60.0;
  double offset_jitter = 10.0;

  static AngleSchedule zero_jitter();

  // Returns {center, half_width} of the step taken to reach leaf i (i >= 2).
  std::pair<double, double> step_range(int i) const;
};

struct SubsetParams {
  SubsetTag tag = SubsetTag::custom;
  int train_w = 512;
  int train_h = 512;
  Pixel center{256, 256};
  int center_delta_w = 40;
  int center_delta_h = 40;
  int leaves_min = 5;
  int leaves_max = 25;
  AngleSchedule schedule;
  int min_visible = 50;
  double scale_jitter = 0.0;        // structured leaves drawn at 1 +- jitter
  bool order_by_area_desc = false;  // place larger leaves first

  static SubsetParams preset(SubsetTag tag);
  std::vector<std::string> validate() const;  // empty when valid
};

struct NaiveParams {
  int canvas_w = 1024;
  int canvas_h = 1024;
  int leaves_min = 10;
  int leaves_max = 40;
  double scale_min = 0.4;
  double scale_max = 1.1;
  int prescale_longest_dim = 600;
  int min_visible = 50;

  std::vector<std::string> validate() const;
};

struct PlacementRecord {
  Placement placement;
  std::int64_t visible_px = 0;
  Label label = 0;  // label in the emitted mask; 0 when dropped for low visibility

  friend bool operator==(const PlacementRecord&, const PlacementRecord&) = default;
};

struct SceneManifest {
  std::string image_id;
  std::string kind;  // "structured" or "naive"
  std::uint64_t global_seed = 0;
  std::uint64_t image_index = 0;
  std::string background_id;
  std::optional<Pixel> plant_center;
  std::vector<PlacementRecord> placements;
  int placed_count = 0;
  int visible_count = 0;

  friend bool operator==(const SceneManifest&, const SceneManifest&) = default;
};

struct Background {
  std::string id;
  RgbImage pixels;
};

struct GeneratedScene {
  Scene scene;  // labels already relabelled to 0..visible_count
  SceneManifest manifest;
};

std::string image_id_for(std::uint64_t image_index);

// Leaf direction for leaf i (i >= 2) given the previous one.
double angle_schedule(int i, double alpha_prev, CounterRng& rng, const AngleSchedule& schedule);

Pixel pick_plant_center(const SubsetParams& params, CounterRng& rng);

GeneratedScene generate_structured(const SubsetParams& params, const LeafBank& bank,
                                   const std::vector<Background>& backgrounds,
                                   std::uint64_t global_seed, std::uint64_t image_index);

GeneratedScene generate_naive(const NaiveParams& params, const LeafBank& bank,
                              const std::vector<Background>& backgrounds,
                              std::uint64_t global_seed, std::uint64_t image_index);

// Re-applies every placement of `manifest` to its background and the
// manifest's visibility relabelling. Yields the emitted scene exactly.
Scene replay_manifest(const SceneManifest& manifest, const LeafBank& bank,
                      const std::vector<Background>& backgrounds);

// Drops placements with fewer than min_visible visible pixels and renumbers
// the rest 1..k in z order. Fills visible_px/label in `records`.
int relabel_visible(LabelImage& labels, std::vector<PlacementRecord>& records, int min_visible);

enum class GeneratorKind { naive, structured };

struct BatchRequest {
  GeneratorKind kind = GeneratorKind::structured;
  std::size_t count = 1;
  std::uint64_t global_seed = 0;
  int workers = 1;
  SubsetParams subset;
  NaiveParams naive;
  std::filesystem::path out_dir;
};

struct BatchSummary {
  std::size_t images = 0;
  std::vector<int> counts;  // visible_count per image, index order
};

// Writes {id}_rgb.png, {id}_label.png, {id}_fg.png, {id}_manifest.json for
// every index and counts.csv. Output is independent of the worker count.
BatchSummary generate_batch(const BatchRequest& request, const LeafBank& bank,
                            const std::vector<Background>& backgrounds);

}  // namespace collage
