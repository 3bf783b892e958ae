// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "collage/dataset_io.hpp"
#include "collage/leafbank.hpp"
#include "collage/metrics.hpp"
#include "collage/synth.hpp"
#include "fixtures.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace collage;
namespace fs = std::filesystem;

namespace {

class Verdict {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    if (failures_++ < 5) problems_ += (problems_.empty() ? "" : "; ") + what;
  }
  void note(const std::string& text) { notes_ += (notes_.empty() ? "" : ", ") + text; }
  bool passed() const { return failures_ == 0; }
  std::string summary() const {
    if (passed()) return fmt::format("{} checks; {}", checks_, notes_);
    return fmt::format("{} of {} checks failed: {}", failures_, checks_, problems_);
  }

 private:
  long checks_ = 0;
  long failures_ = 0;
  std::string problems_;
  std::string notes_;
};

struct PresetCase {
  SubsetTag tag;
  int width, height, cx, cy, delta_w, delta_h, leaves_min, leaves_max;
};

void criterion_presets(Verdict& v) {
  const PresetCase cases[] = {{SubsetTag::A1, 512, 512, 256, 256, 40, 40, 5, 25},
                              {SubsetTag::A2, 512, 512, 256, 256, 40, 40, 3, 25},
                              {SubsetTag::A3, 2048, 2048, 1024, 1024, 160, 160, 2, 15},
                              {SubsetTag::A4, 448, 448, 224, 224, 35, 35, 4, 30}};
  double gen_seconds = 0.0;
  for (const PresetCase& c : cases) {
    const SubsetParams p = SubsetParams::preset(c.tag);
    const LeafBank bank = testing::make_structured_bank(c.tag, 3, 100 + static_cast<int>(c.tag));
    const auto bgs = testing::make_backgrounds(3, c.width, c.height, 7);
    const std::string tag(to_string(c.tag));
    v.expect(!bank.empty(), tag + " bank is empty");
    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t i = 0; i < 50; ++i) {
      const GeneratedScene g = generate_structured(p, bank, bgs, 2024, i);
      const SceneManifest& m = g.manifest;
      v.expect(g.scene.pixels.width() == c.width && g.scene.pixels.height() == c.height &&
                   g.scene.labels.width() == c.width && g.scene.labels.height() == c.height,
               fmt::format("{} scene {} has the wrong size", tag, i));
      v.expect(m.plant_center && std::abs(m.plant_center->x - c.cx) * 2 <= c.delta_w &&
                   std::abs(m.plant_center->y - c.cy) * 2 <= c.delta_h,
               fmt::format("{} scene {} center outside the delta box", tag, i));
      v.expect(m.placed_count >= c.leaves_min && m.placed_count <= c.leaves_max,
               fmt::format("{} scene {} has {} leaves", tag, i, m.placed_count));
      v.expect(m.visible_count <= m.placed_count, fmt::format("{} scene {} visible > placed", tag, i));
    }
    gen_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  v.expect(gen_seconds < 120.0, fmt::format("generation took {:.1f} s", gen_seconds));
  v.note(fmt::format("200 scenes generated in {:.1f} s", gen_seconds));
}

void criterion_angles(Verdict& v) {
  CounterRng rng(77, 2);
  const AngleSchedule s;
  const int n = 20000;
  double within_sum = 0.0, open_sum = 0.0, within_lo = 360, within_hi = 0, open_lo = 360, open_hi = 0;
  for (int k = 0; k < n; ++k) {
    const double prev = rng.uniform(0.0, 360.0);
    const double step = wrap_degrees(angle_schedule(k % 2 == 0 ? 2 : 3, prev, rng, s) - prev);
    within_sum += step;
    within_lo = std::min(within_lo, step);
    within_hi = std::max(within_hi, step);
    const double open = wrap_degrees(angle_schedule(4, prev, rng, s) - prev);
    open_sum += open;
    open_lo = std::min(open_lo, open);
    open_hi = std::max(open_hi, open);
  }
  v.expect(within_lo >= 115.0 && within_hi <= 140.0, fmt::format("within steps span [{}, {}]", within_lo, within_hi));
  v.expect(std::abs(within_sum / n - 127.5) <= 1.0, fmt::format("within mean {}", within_sum / n));
  v.expect(open_lo >= 50.0 && open_hi <= 70.0, fmt::format("openings span [{}, {}]", open_lo, open_hi));
  v.expect(std::abs(open_sum / n - 60.0) <= 1.0, fmt::format("opening mean {}", open_sum / n));

  const double expected[] = {0.0, 127.5, 255.0, 315.0, 82.5, 210.0, 240.0, 7.5, 135.0, 150.0};
  double alpha = 0.0;
  for (int i = 2; i <= 10; ++i) {
    alpha = angle_schedule(i, alpha, rng, AngleSchedule::zero_jitter());
    v.expect(alpha == expected[i - 1], fmt::format("zero-jitter alpha_{} = {}", i, alpha));
  }
  v.note(fmt::format("{} within steps in [{:.2f}, {:.2f}] mean {:.3f}; openings in [{:.2f}, {:.2f}] mean {:.3f}", n,
                     within_lo, within_hi, within_sum / n, open_lo, open_hi, open_sum / n));
}

void criterion_replay(Verdict& v) {
  const LeafBank a1 = testing::make_structured_bank(SubsetTag::A1, 3, 5);
  const auto a1_bgs = testing::make_backgrounds(3, 512, 512, 3);
  const LeafBank a4 = testing::make_structured_bank(SubsetTag::A4, 3, 6);
  const auto a4_bgs = testing::make_backgrounds(2, 448, 448, 4);
  int oracle_scenes = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const bool use_a4 = i % 2 == 1;
    const LeafBank& bank = use_a4 ? a4 : a1;
    const auto& bgs = use_a4 ? a4_bgs : a1_bgs;
    const GeneratedScene g =
        generate_structured(SubsetParams::preset(use_a4 ? SubsetTag::A4 : SubsetTag::A1), bank, bgs, 31, i);
    const SceneManifest m = manifest_from_json(manifest_to_json(g.manifest));
    const Scene replay = replay_manifest(m, bank, bgs);
    v.expect(replay.labels == g.scene.labels, fmt::format("scene {} label mask differs on replay", i));
    v.expect(replay.pixels == g.scene.pixels, fmt::format("scene {} pixels differ on replay", i));
    if (i < 10) {
      const LabelImage z = oracle::max_z_labels(m, bank, g.scene.labels.width(), g.scene.labels.height());
      std::vector<Label> label_of(m.placements.size() + 1, 0);
      for (const auto& rec : m.placements) label_of[static_cast<std::size_t>(rec.placement.z)] = rec.label;
      bool same = true;
      for (int y = 0; y < z.height() && same; ++y) {
        for (int x = 0; x < z.width() && same; ++x) same = g.scene.labels.at(x, y) == label_of[z.at(x, y)];
      }
      v.expect(same, fmt::format("scene {} disagrees with the max-z oracle", i));
      ++oracle_scenes;
    }
  }
  v.note(fmt::format("100 replays, {} scenes against the max-z oracle", oracle_scenes));
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "collage");
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

void criterion_workers(Verdict& v) {
  const fs::path root = testing::scratch_dir("acceptance_workers");
  save_bank(testing::make_structured_bank(SubsetTag::A1, 3, 9), root / "bank_s");
  save_backgrounds(testing::make_backgrounds(3, 512, 512, 9), root / "bg_s");
  save_bank(testing::make_naive_bank(2, 9, 600), root / "bank_n");
  save_backgrounds(testing::make_backgrounds(2, 1024, 1024, 9), root / "bg_n");
  write_text_file(root / "run.ini", "seed = 4242\n[generate]\npreset = A2\ncount = 16\n");

  struct Run {
    std::string kind, bank, bg;
  };
  for (const Run& r : {Run{"structured", "bank_s", "bg_s"}, Run{"naive", "bank_n", "bg_n"}}) {
    std::map<std::string, std::string> first;
    for (const char* workers : {"1", "4"}) {
      const fs::path out = root / (r.kind + "_w" + workers);
      std::vector<std::string> args{"generate",        "--config",      (root / "run.ini").string(),
                                    "--kind",          r.kind,          "--bank",
                                    (root / r.bank).string(), "--backgrounds", (root / r.bg).string(),
                                    "--workers",       workers,         "--out",
                                    out.string()};
      if (r.kind == "naive") {
        args.insert(args.end(), {"--count", "6", "--leaves-max", "20"});
      }
      const int code = run_cli(args);
      v.expect(code == 0, fmt::format("{} generate with {} workers exited {}", r.kind, workers, code));
      const auto tree = testing::read_tree(out);
      if (first.empty()) {
        first = tree;
      } else {
        v.expect(tree == first, fmt::format("{} trees differ between 1 and 4 workers", r.kind));
      }
    }
    v.note(fmt::format("{}: {} files identical", r.kind, first.size()));
  }
}

void criterion_metrics(Verdict& v) {
  CounterRng rng(555, 0);
  double worst = 0.0;
  const int pairs = 5000;
  for (int k = 0; k < pairs; ++k) {
    const LabelImage pred = testing::random_labels(rng, 6, 6, static_cast<int>(rng.uniform_int(0, 3)));
    const LabelImage gt = testing::random_labels(rng, 6, 6, static_cast<int>(rng.uniform_int(0, 3)));
    const BestDice bd = best_dice(pred, gt);
    worst = std::max({worst, std::abs(bd.symmetric - oracle::best_dice_symmetric(pred, gt)),
                      std::abs(bd.pred_to_gt - oracle::best_dice_directional(gt, pred)),
                      std::abs(bd.gt_to_pred - oracle::best_dice_directional(pred, gt)),
                      std::abs(fgbg_dice(pred, gt) - oracle::fgbg_dice(pred, gt))});
    const CountDiff cd = count_diffs(pred, gt);
    const int expected = oracle::count_instances(pred) - oracle::count_instances(gt);
    v.expect(cd.diff_fg == expected && cd.abs_diff_fg == std::abs(expected), fmt::format("count diff on pair {}", k));
  }
  v.expect(worst <= 1e-12, fmt::format("max deviation {}", worst));

  const fs::path gt_dir = testing::scratch_dir("acceptance_selfeval");
  BatchRequest req;
  req.count = 20;
  req.global_seed = 8;
  req.workers = 2;
  req.subset = SubsetParams::preset(SubsetTag::A1);
  req.out_dir = gt_dir;
  generate_batch(req, testing::make_structured_bank(SubsetTag::A1, 2, 8), testing::make_backgrounds(2, 512, 512, 8));
  const MetricsReport self = evaluate_dataset(gt_dir, gt_dir);
  v.expect(self.images.size() == 20 && self.complete(), "self evaluation did not pair all 20 images");
  for (const ImageMetrics& m : self.images) {
    v.expect(m.best_dice == 1.0 && m.fgbg_dice == 1.0 && m.diff_fg == 0,
             fmt::format("self evaluation of {} is not perfect", m.image_id));
  }
  v.note(fmt::format("{} pairs, max deviation {:g}; {} self-evaluated images", pairs, worst, self.images.size()));
}

void criterion_naive(Verdict& v) {
  const LeafBank bank = testing::make_naive_bank(3, 21, 600);
  const auto bgs = testing::make_backgrounds(3, 1024, 1024, 21);
  for (const LeafCutout& leaf : bank.leaves) {
    v.expect(std::max(leaf.pixels.width(), leaf.pixels.height()) == 600,
             fmt::format("leaf {} longest side {}", leaf.id(), std::max(leaf.pixels.width(), leaf.pixels.height())));
  }
  const NaiveParams p;
  std::size_t placements = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const GeneratedScene g = generate_naive(p, bank, bgs, 66, i);
    v.expect(g.scene.pixels.width() == 1024 && g.scene.pixels.height() == 1024, "canvas is not 1024x1024");
    for (const PlacementRecord& r : g.manifest.placements) {
      const Placement& pl = r.placement;
      v.expect(pl.scale_x >= 0.4 && pl.scale_x <= 1.1 && pl.scale_y >= 0.4 && pl.scale_y <= 1.1,
               fmt::format("scene {} scale ({}, {})", i, pl.scale_x, pl.scale_y));
      v.expect(pl.angle_deg >= 0.0 && pl.angle_deg < 360.0, fmt::format("scene {} angle {}", i, pl.angle_deg));
      v.expect(pl.position.x >= 0 && pl.position.x < 1024 && pl.position.y >= 0 && pl.position.y < 1024,
               fmt::format("scene {} anchor ({}, {})", i, pl.position.x, pl.position.y));
      ++placements;
    }
  }
  v.note(fmt::format("{} bank leaves, {} placements in 50 scenes", bank.size(), placements));
}

void criterion_alignment(Verdict& v) {
  CounterRng rng(3141, 0);
  std::size_t leaves = 0;
  double worst_area = 0.0;
  int worst_offset = 0;
  for (int image = 0; leaves < 100 && image < 200; ++image) {
    const AnnotatedImage img =
        testing::make_rosette(testing::random_rosette(rng, 530, 500, 6), fmt::format("p{:03d}", image));
    std::map<std::string, std::int64_t> original_area;
    for (const LeafCutout& c : extract_leaves(img)) original_area[c.id()] = c.area_px;
    const LeafBank bank = build_bank({img}, BankOptions{});
    for (const LeafCutout& leaf : bank.leaves) {
      const Pixel tip = oracle::farthest_pixel(alpha_mask(leaf.pixels), leaf.anchor.x, leaf.anchor.y);
      const int offset = std::abs(tip.x - leaf.anchor.x);
      const double before = static_cast<double>(original_area.at(leaf.id()));
      const double change = std::abs(static_cast<double>(count_on(alpha_mask(leaf.pixels))) - before) / before;
      v.expect(offset <= 1, fmt::format("{} tip is {} columns off", leaf.id(), offset));
      v.expect(change <= 0.05, fmt::format("{} area changed by {:.2f}%", leaf.id(), 100 * change));
      worst_offset = std::max(worst_offset, offset);
      worst_area = std::max(worst_area, change);
      ++leaves;
    }
  }
  v.expect(leaves >= 100, fmt::format("only {} bank leaves", leaves));
  v.note(fmt::format("{} leaves, max tip offset {} px, max area change {:.2f}%", leaves, worst_offset,
                     100 * worst_area));
}

void fill_prefix(LabelImage& img, int x0, int y0, int w, int n, Label l) {
  for (int k = 0; k < n; ++k) img.at(x0 + k % w, y0 + k / w) = l;
}

void criterion_iou(Verdict& v) {
  LabelImage gt(120, 120, 0);
  fill_prefix(gt, 0, 0, 50, 699, 1);
  LabelImage pred(120, 120, 0);
  Detection d = iou_detection_eval(pred, gt);
  v.expect(d.detected == 0 && d.missed == 0, "699 px leaf was not excluded");

  gt = LabelImage(120, 120, 0);
  fill_prefix(gt, 0, 0, 40, 1000, 1);
  fill_prefix(gt, 60, 0, 40, 1000, 2);
  pred = LabelImage(120, 120, 0);
  fill_prefix(pred, 0, 0, 40, 800, 1);
  fill_prefix(pred, 60, 0, 40, 790, 2);
  d = iou_detection_eval(pred, gt);
  v.expect(d.detected == 1 && d.missed == 1, fmt::format("IOU 0.80/0.79 gave {} detected, {} missed", d.detected,
                                                         d.missed));
  v.note("699 px excluded, IOU 0.80 detected, 0.79 missed");
}

void criterion_filter(Verdict& v) {
  const AnnotatedImage img = testing::make_filter_fixture();
  const auto cuts = extract_leaves(img);
  const FilterReport r = filter_leaves(cuts, make_filter_context(img, {}));
  std::map<std::string, DiscardReason> why(r.discarded.begin(), r.discarded.end());
  auto reason = [&](const std::string& id) { return why.count(id) ? std::string(to_string(why.at(id))) : "kept"; };
  v.expect(r.kept == std::vector<std::string>{"s_1"}, "clean leaf not the only one kept");
  v.expect(reason("s_2") == "multi_component", "two-component leaf: " + reason("s_2"));
  v.expect(reason("s_4") == "base_far_from_center", "distant leaf: " + reason("s_4"));
  v.expect(reason("s_5") == "occluded", "6% occluded leaf: " + reason("s_5"));
  v.note(fmt::format("s_2 {}, s_4 {}, s_5 {} (occluded fraction {:.2f}), s_1 kept", reason("s_2"), reason("s_4"),
                     reason("s_5"), occluded_boundary_fraction(cuts[4], img.labels)));
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void(Verdict&)>> criteria[] = {
      {"preset conformance", criterion_presets},
      {"angle schedule statistics", criterion_angles},
      {"mask/manifest fidelity", criterion_replay},
      {"worker-count determinism", criterion_workers},
      {"metric oracle equivalence", criterion_metrics},
      {"naive collage bounds", criterion_naive},
      {"canonical alignment", criterion_alignment},
      {"IOU detection protocol", criterion_iou},
      {"filter correctness", criterion_filter},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(v);
    } catch (const std::exception& e) {
      v.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !v.passed();
    std::cout << fmt::format("{} criterion {} ({}): {} [{:.1f} s]", v.passed() ? "PASS" : "FAIL", index, name,
                             v.summary(), secs)
              << std::endl;
  }
  std::cout << fmt::format("{} of 9 criteria passed", 9 - failed) << std::endl;
  return failed == 0 ? 0 : 1;
}
