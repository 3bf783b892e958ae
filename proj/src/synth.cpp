#include "collage/synth.hpp"

#include <fmt/format.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>

#include "collage/dataset_io.hpp"
#include "collage/error.hpp"
#include "collage/kernels.hpp"

namespace collage {

AngleSchedule AngleSchedule::zero_jitter() {
  AngleSchedule s;
  s.within_jitter = 0.0;
  s.offset_jitter = 0.0;
  return s;
}

std::pair<double, double> AngleSchedule::step_range(int i) const {
  if (i < 2) fail(Errc::contract_violation, "angle schedule: leaf index must be >= 2");
  if ((i - 1) % 3 != 0) return {within_mean, within_jitter};
  // Leaf i opens triad t = (i - 1) / 3 + 1; offsets halve with every triad.
  const int t = (i - 1) / 3 + 1;
  return {std::ldexp(offset_base, -(t - 2)), std::ldexp(offset_jitter, -(t - 2))};
}

double angle_schedule(int i, double alpha_prev, CounterRng& rng, const AngleSchedule& schedule) {
  const auto [center, half] = schedule.step_range(i);
  const double u = rng.uniform01();
  return wrap_degrees(alpha_prev + (center - half) + 2.0 * half * u);
}

SubsetParams SubsetParams::preset(SubsetTag tag) {
  SubsetParams p;
  p.tag = tag;
  switch (tag) {
    case SubsetTag::A1:
    case SubsetTag::custom:
      break;
    case SubsetTag::A2:
      p.leaves_min = 3;
      break;
    case SubsetTag::A3:
      p.train_w = p.train_h = 2048;
      p.center = {1024, 1024};
      p.center_delta_w = p.center_delta_h = 160;
      p.leaves_min = 2;
      p.leaves_max = 15;
      break;
    case SubsetTag::A4:
      p.train_w = p.train_h = 448;
      p.center = {224, 224};
      p.center_delta_w = p.center_delta_h = 35;
      p.leaves_min = 4;
      p.leaves_max = 30;
      break;
  }
  return p;
}

std::vector<std::string> SubsetParams::validate() const {
  std::vector<std::string> errors;
  if (train_w <= 0 || train_w % 64 != 0) errors.push_back(fmt::format("train_w = {} is not a positive multiple of 64", train_w));
  if (train_h <= 0 || train_h % 64 != 0) errors.push_back(fmt::format("train_h = {} is not a positive multiple of 64", train_h));
  if (center_delta_w < 0 || center_delta_h < 0) errors.push_back("center deltas must be >= 0");
  if (center.x - center_delta_w / 2.0 < 0 || center.x + center_delta_w / 2.0 > train_w - 1 ||
      center.y - center_delta_h / 2.0 < 0 || center.y + center_delta_h / 2.0 > train_h - 1) {
    errors.push_back(fmt::format("plant center box ({},{}) +- ({}x{})/2 leaves the {}x{} canvas", center.x,
                                 center.y, center_delta_w, center_delta_h, train_w, train_h));
  }
  if (leaves_min < 0 || leaves_min > leaves_max) {
    errors.push_back(fmt::format("leaf range {}-{} is invalid", leaves_min, leaves_max));
  }
  if (leaves_max > 65535) errors.push_back("leaves_max exceeds the 16-bit label range");
  if (schedule.within_jitter < 0 || schedule.offset_jitter < 0) errors.push_back("angle jitters must be >= 0");
  if (min_visible < 0) errors.push_back("min_visible must be >= 0");
  if (!(scale_jitter >= 0.0 && scale_jitter < 1.0)) errors.push_back("scale_jitter must lie in [0, 1)");
  return errors;
}

std::vector<std::string> NaiveParams::validate() const {
  std::vector<std::string> errors;
  if (canvas_w <= 0 || canvas_h <= 0) errors.push_back("canvas dimensions must be positive");
  if (leaves_min < 0 || leaves_min > leaves_max) {
    errors.push_back(fmt::format("leaf range {}-{} is invalid", leaves_min, leaves_max));
  }
  if (leaves_max > 65535) errors.push_back("leaves_max exceeds the 16-bit label range");
  if (!(scale_min > 0.0 && scale_min <= scale_max && scale_max <= 16.0)) {
    errors.push_back(fmt::format("scale range {}-{} is invalid", scale_min, scale_max));
  }
  if (prescale_longest_dim <= 0) errors.push_back("prescale_longest_dim must be positive");
  if (min_visible < 0) errors.push_back("min_visible must be >= 0");
  return errors;
}

std::string image_id_for(std::uint64_t image_index) { return fmt::format("{:06d}", image_index); }

Pixel pick_plant_center(const SubsetParams& params, CounterRng& rng) {
  const double dx = rng.uniform(-params.center_delta_w / 2.0, params.center_delta_w / 2.0);
  const double dy = rng.uniform(-params.center_delta_h / 2.0, params.center_delta_h / 2.0);
  const long x = std::lround(params.center.x + dx);
  const long y = std::lround(params.center.y + dy);
  return {static_cast<int>(std::clamp<long>(x, 0, params.train_w - 1)),
          static_cast<int>(std::clamp<long>(y, 0, params.train_h - 1))};
}

int relabel_visible(LabelImage& labels, std::vector<PlacementRecord>& records, int min_visible) {
  std::vector<std::int64_t> visible(records.size() + 1, 0);
  for (Label l : labels.pixels()) {
    if (l != 0 && l <= records.size()) ++visible[l];
  }
  std::vector<Label> remap(records.size() + 1, 0);
  int next = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto z = static_cast<std::size_t>(records[i].placement.z);
    records[i].visible_px = z < visible.size() ? visible[z] : 0;
    records[i].label = 0;
    if (records[i].visible_px >= min_visible && records[i].visible_px > 0) {
      records[i].label = static_cast<Label>(++next);
      remap[z] = records[i].label;
    }
  }
  for (Label& l : labels.pixels()) l = l < remap.size() ? remap[l] : 0;
  return next;
}

namespace {

void require(const std::vector<std::string>& errors, std::string_view what) {
  if (errors.empty()) return;
  std::string msg = fmt::format("invalid {}:", what);
  for (const auto& e : errors) msg += "\n  " + e;
  fail(Errc::configuration, msg);
}

void require_inputs(const LeafBank& bank, const std::vector<Background>& backgrounds, int w, int h) {
  if (bank.empty()) fail(Errc::configuration, "leaf bank is empty");
  if (backgrounds.empty()) fail(Errc::configuration, "no background images");
  for (const Background& bg : backgrounds) {
    if (bg.pixels.width() != w || bg.pixels.height() != h) {
      fail(Errc::configuration, fmt::format("background '{}' is {}x{}, expected {}x{}", bg.id,
                                            bg.pixels.width(), bg.pixels.height(), w, h));
    }
  }
}

GeneratedScene finish(Scene scene, SceneManifest manifest, std::vector<PlacementRecord> records,
                      int min_visible) {
  manifest.placed_count = static_cast<int>(records.size());
  manifest.visible_count = relabel_visible(scene.labels, records, min_visible);
  manifest.placements = std::move(records);
  return {std::move(scene), std::move(manifest)};
}

}  // namespace

GeneratedScene generate_structured(const SubsetParams& params, const LeafBank& bank,
                                   const std::vector<Background>& backgrounds,
                                   std::uint64_t global_seed, std::uint64_t image_index) {
  require(params.validate(), "subset parameters");
  require_inputs(bank, backgrounds, params.train_w, params.train_h);
  for (const LeafCutout& leaf : bank.leaves) {
    if (!leaf.aligned) fail(Errc::configuration, fmt::format("bank leaf '{}' is not aligned", leaf.id()));
  }

  CounterRng rng(global_seed, image_index);
  const auto& bg = backgrounds[static_cast<std::size_t>(rng.uniform_int(0, backgrounds.size() - 1))];
  const int n = static_cast<int>(rng.uniform_int(params.leaves_min, params.leaves_max));
  const Pixel center = pick_plant_center(params, rng);

  std::vector<std::size_t> picks(static_cast<std::size_t>(n));
  for (auto& p : picks) p = static_cast<std::size_t>(rng.uniform_int(0, bank.size() - 1));
  if (params.order_by_area_desc) {
    std::stable_sort(picks.begin(), picks.end(), [&bank](std::size_t a, std::size_t b) {
      return bank.leaves[a].area_px > bank.leaves[b].area_px;
    });
  }

  SceneManifest manifest;
  manifest.image_id = image_id_for(image_index);
  manifest.kind = "structured";
  manifest.global_seed = global_seed;
  manifest.image_index = image_index;
  manifest.background_id = bg.id;
  manifest.plant_center = center;

  Scene scene = Scene::from_background(bg.pixels);
  std::vector<PlacementRecord> records;
  records.reserve(picks.size());
  double alpha = 0.0;
  for (int i = 1; i <= n; ++i) {
    alpha = i == 1 ? rng.uniform(0.0, 360.0) : angle_schedule(i, alpha, rng, params.schedule);
    double s = 1.0;
    if (params.scale_jitter > 0.0) s = rng.uniform(1.0 - params.scale_jitter, 1.0 + params.scale_jitter);

    const LeafCutout& leaf = bank.leaves[picks[static_cast<std::size_t>(i - 1)]];
    Placement p;
    p.leaf_id = leaf.id();
    p.position = center;
    // Aligned leaves point up (90 degrees); turn them to face alpha.
    p.angle_deg = wrap_degrees(alpha - 90.0);
    p.scale_x = p.scale_y = s;
    p.z = i;
    composite_leaf(scene, leaf, p);
    records.push_back({std::move(p), 0, 0});
  }
  return finish(std::move(scene), std::move(manifest), std::move(records), params.min_visible);
}

GeneratedScene generate_naive(const NaiveParams& params, const LeafBank& bank,
                              const std::vector<Background>& backgrounds,
                              std::uint64_t global_seed, std::uint64_t image_index) {
  require(params.validate(), "naive parameters");
  require_inputs(bank, backgrounds, params.canvas_w, params.canvas_h);
  for (const LeafCutout& leaf : bank.leaves) {
    if (std::max(leaf.pixels.width(), leaf.pixels.height()) != params.prescale_longest_dim) {
      fail(Errc::configuration, fmt::format("bank leaf '{}' is not prescaled to {} px", leaf.id(),
                                            params.prescale_longest_dim));
    }
  }

  CounterRng rng(global_seed, image_index);
  const auto& bg = backgrounds[static_cast<std::size_t>(rng.uniform_int(0, backgrounds.size() - 1))];
  const int n = static_cast<int>(rng.uniform_int(params.leaves_min, params.leaves_max));

  SceneManifest manifest;
  manifest.image_id = image_id_for(image_index);
  manifest.kind = "naive";
  manifest.global_seed = global_seed;
  manifest.image_index = image_index;
  manifest.background_id = bg.id;

  Scene scene = Scene::from_background(bg.pixels);
  std::vector<PlacementRecord> records;
  for (int i = 1; i <= n; ++i) {
    const LeafCutout& leaf = bank.leaves[static_cast<std::size_t>(rng.uniform_int(0, bank.size() - 1))];
    Placement p;
    p.leaf_id = leaf.id();
    p.scale_x = rng.uniform(params.scale_min, params.scale_max);
    p.scale_y = rng.uniform(params.scale_min, params.scale_max);
    p.angle_deg = rng.uniform(0.0, 360.0);
    p.position = {static_cast<int>(rng.uniform_int(0, params.canvas_w - 1)),
                  static_cast<int>(rng.uniform_int(0, params.canvas_h - 1))};
    p.z = i;
    composite_leaf(scene, leaf, p);
    records.push_back({std::move(p), 0, 0});
  }
  return finish(std::move(scene), std::move(manifest), std::move(records), params.min_visible);
}

Scene replay_manifest(const SceneManifest& manifest, const LeafBank& bank,
                      const std::vector<Background>& backgrounds) {
  const auto bg = std::find_if(backgrounds.begin(), backgrounds.end(),
                               [&](const Background& b) { return b.id == manifest.background_id; });
  if (bg == backgrounds.end()) {
    fail(Errc::invalid_input, fmt::format("replay: background '{}' not found", manifest.background_id));
  }
  std::map<std::string, const LeafCutout*> by_id;
  for (const LeafCutout& leaf : bank.leaves) by_id.emplace(leaf.id(), &leaf);

  Scene scene = Scene::from_background(bg->pixels);
  std::vector<Label> remap(manifest.placements.size() + 1, 0);
  for (const PlacementRecord& rec : manifest.placements) {
    const auto it = by_id.find(rec.placement.leaf_id);
    if (it == by_id.end()) {
      fail(Errc::invalid_input, fmt::format("replay: leaf '{}' not in bank", rec.placement.leaf_id));
    }
    composite_leaf(scene, *it->second, rec.placement);
    remap[static_cast<std::size_t>(rec.placement.z)] = rec.label;
  }
  for (Label& l : scene.labels.pixels()) l = remap[l];
  return scene;
}

BatchSummary generate_batch(const BatchRequest& request, const LeafBank& bank,
                            const std::vector<Background>& backgrounds) {
  if (request.count < 1) fail(Errc::configuration, "generate_batch: count must be >= 1");
  if (request.workers < 1) fail(Errc::configuration, "generate_batch: workers must be >= 1");
  if (request.kind == GeneratorKind::structured) {
    require(request.subset.validate(), "subset parameters");
  } else {
    require(request.naive.validate(), "naive parameters");
  }
  std::error_code ec;
  std::filesystem::create_directories(request.out_dir, ec);
  if (ec) {
    fail(Errc::io, fmt::format("cannot create output directory '{}': {}", request.out_dir.string(), ec.message()));
  }

  const auto count = static_cast<std::int64_t>(request.count);
  BatchSummary summary;
  summary.images = request.count;
  summary.counts.assign(request.count, 0);
  std::vector<std::exception_ptr> errors(request.count);

#pragma omp parallel for schedule(dynamic, 1) num_threads(request.workers)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      const auto index = static_cast<std::uint64_t>(i);
      GeneratedScene g = request.kind == GeneratorKind::structured
                             ? generate_structured(request.subset, bank, backgrounds, request.global_seed, index)
                             : generate_naive(request.naive, bank, backgrounds, request.global_seed, index);
      write_scene(g.scene, g.manifest, request.out_dir);
      summary.counts[static_cast<std::size_t>(i)] = g.manifest.visible_count;
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::string csv = "image_id,count\n";
  for (std::size_t i = 0; i < summary.counts.size(); ++i) {
    csv += fmt::format("{},{}\n", image_id_for(i), summary.counts[i]);
  }
  write_text_file(request.out_dir / "counts.csv", csv);
  return summary;
}

}  // namespace collage
