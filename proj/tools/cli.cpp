#include "cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <filesystem>
#include <optional>
#include <ostream>

#include "collage/dataset_io.hpp"
#include "collage/error.hpp"
#include "collage/kernels.hpp"
#include "collage/leafbank.hpp"
#include "collage/metrics.hpp"
#include "collage/png_io.hpp"
#include "collage/synth.hpp"

namespace fs = std::filesystem;

namespace collage::cli {

Mask label_transitions(const LabelImage& labels) {
  Mask out(labels.width(), labels.height(), 0);
  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) {
      const Label l = labels.at(x, y);
      const bool edge = (x > 0 && labels.at(x - 1, y) != l) || (x + 1 < labels.width() && labels.at(x + 1, y) != l) ||
                        (y > 0 && labels.at(x, y - 1) != l) || (y + 1 < labels.height() && labels.at(x, y + 1) != l);
      out.at(x, y) = edge ? 1 : 0;
    }
  }
  return out;
}

RgbImage render_overlay(const RgbImage& rgb, const LabelImage& labels) {
  if (!same_shape(rgb, labels)) {
    fail(Errc::invalid_input, fmt::format("overlay: image is {}x{} but labels are {}x{}", rgb.width(), rgb.height(),
                                          labels.width(), labels.height()));
  }
  const Mask edges = label_transitions(labels);
  RgbImage out = rgb;
  auto blend = [](std::uint8_t base, std::uint8_t tint) {
    return static_cast<std::uint8_t>((base + 3 * tint + 2) / 4);
  };
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      if (!edges.at(x, y)) continue;
      Rgb& p = out.at(x, y);
      p = {blend(p.r, kBoundaryTint.r), blend(p.g, kBoundaryTint.g), blend(p.b, kBoundaryTint.b)};
    }
  }
  return out;
}

namespace {

struct Shared {
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out;
};

struct IngestArgs {
  std::string source;
  std::string subset = "custom";
  std::string kind = "structured";
  double base_dist_frac = FilterThresholds{}.base_dist_frac;
  double occlusion_frac = FilterThresholds{}.occlusion_frac;
  std::int64_t min_area = FilterThresholds{}.min_area;
  int prescale = BankOptions{}.prescale_longest_dim;
  std::string backgrounds;
  std::optional<int> bg_width;
  std::optional<int> bg_height;
  std::string bg_crop = "center";
  bool bg_resize = false;
};

struct GenerateArgs {
  std::string bank;
  std::string backgrounds;
  std::string kind = "structured";
  std::string preset = "A1";
  long long count = 1;
  std::optional<int> train_w, train_h, center_x, center_y, center_delta_w, center_delta_h;
  std::optional<int> leaves_min, leaves_max, min_visible;
  std::optional<double> within_mean, within_jitter, offset_base, offset_jitter, scale_jitter;
  bool zero_jitter = false;
  bool order_by_area = false;
  std::optional<int> canvas_w, canvas_h, prescale;
  std::optional<double> scale_min, scale_max;
};

struct EvaluateArgs {
  std::string pred;
  std::string gt;
  std::string suffix = "_label.png";
};

struct InspectArgs {
  std::string scene;
};

// Thrown after every validation problem has been collected.
struct ValidationFailed {
  std::vector<std::string> errors;
};

void require_dir(std::vector<std::string>& errors, const std::string& flag, const std::string& path) {
  if (path.empty()) {
    errors.push_back(fmt::format("{} is required", flag));
  } else if (!fs::is_directory(path)) {
    errors.push_back(fmt::format("{} '{}' is not a directory", flag, path));
  }
}

void require_shared(std::vector<std::string>& errors, const Shared& shared) {
  if (shared.out.empty()) errors.push_back("--out is required");
  if (shared.workers < 1) errors.push_back(fmt::format("--workers must be >= 1 (got {})", shared.workers));
}

void check(const std::vector<std::string>& errors) {
  if (!errors.empty()) throw ValidationFailed{errors};
}

template <class T>
void apply(T& field, const std::optional<T>& value) {
  if (value) field = *value;
}

std::string join_results(const CLI::Option& opt) {
  std::string text;
  for (const std::string& r : opt.results()) {
    if (!text.empty()) text += ",";
    text += r;
  }
  return text;
}

// Every flag of the command with its effective value. --workers and --out are
// left out so that otherwise identical runs produce identical trees.
std::string run_metadata(const CLI::App& app, const CLI::App& command) {
  std::string text = fmt::format("command = {}\n", command.get_name());
  auto emit = [&text](const CLI::App& a) {
    for (const CLI::Option* opt : a.get_options()) {
      const std::string name = opt->get_single_name();
      if (name == "help" || name == "config" || name == "workers" || name == "out") continue;
      std::string value = opt->count() > 0 ? join_results(*opt) : opt->get_default_str();
      if (value.empty() && opt->get_expected_min() == 0) value = "false";
      if (value.empty()) continue;
      text += fmt::format("{} = {}\n", name, value);
    }
  };
  emit(app);
  emit(command);
  return text;
}

void write_metadata(const fs::path& out, const CLI::App& app, const CLI::App& command) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) fail(Errc::io, fmt::format("cannot create '{}': {}", out.string(), ec.message()));
  write_text_file(out / "run_metadata.txt", run_metadata(app, command));
}

int cmd_ingest(const Shared& shared, const IngestArgs& a, const CLI::App& app, const CLI::App& command,
               std::ostream& out) {
  std::vector<std::string> errors;
  require_shared(errors, shared);
  require_dir(errors, "--source", a.source);
  std::optional<SubsetTag> tag;
  try {
    tag = parse_subset_tag(a.subset);
  } catch (const Error&) {
    errors.push_back(fmt::format("--subset '{}' is not one of A1, A2, A3, A4, custom", a.subset));
  }
  if (a.kind != "structured" && a.kind != "naive") {
    errors.push_back(fmt::format("--kind '{}' is not one of structured, naive", a.kind));
  }
  if (!(a.base_dist_frac > 0.0)) errors.push_back("--base-dist-frac must be > 0");
  if (!(a.occlusion_frac >= 0.0 && a.occlusion_frac <= 1.0)) errors.push_back("--occlusion-frac must lie in [0, 1]");
  if (a.min_area < 0) errors.push_back("--min-area must be >= 0");
  if (a.prescale <= 0) errors.push_back("--prescale must be > 0");
  if (!a.backgrounds.empty()) require_dir(errors, "--backgrounds", a.backgrounds);
  if (a.bg_crop != "center" && a.bg_crop != "random") {
    errors.push_back(fmt::format("--bg-crop '{}' is not one of center, random", a.bg_crop));
  }
  if ((a.bg_width && *a.bg_width <= 0) || (a.bg_height && *a.bg_height <= 0)) {
    errors.push_back("--bg-width and --bg-height must be > 0");
  }
  check(errors);

  const bool naive = a.kind == "naive";
  std::vector<AnnotatedImage> images;
  for (const SourceRecord& rec : scan_source_dir(a.source, *tag)) images.push_back(load_annotated(rec));

  BankOptions opts;
  opts.kind = naive ? BankKind::naive : BankKind::structured;
  opts.thresholds = {a.base_dist_frac, a.occlusion_frac, a.min_area};
  opts.prescale_longest_dim = a.prescale;
  BankTally tally;
  const LeafBank bank = build_bank(images, opts, &tally);

  const fs::path out_dir = shared.out;
  save_bank(bank, out_dir / "bank");
  std::size_t n_backgrounds = 0;
  if (!a.backgrounds.empty()) {
    BackgroundOptions bg;
    const SubsetParams preset = SubsetParams::preset(*tag);
    bg.width = a.bg_width.value_or(naive ? NaiveParams{}.canvas_w : preset.train_w);
    bg.height = a.bg_height.value_or(naive ? NaiveParams{}.canvas_h : preset.train_h);
    bg.mode = a.bg_crop == "random" ? CropMode::random : CropMode::center;
    bg.allow_resize = a.bg_resize;
    bg.seed = shared.seed;
    const auto prepared = prepare_backgrounds(load_backgrounds(a.backgrounds), bg);
    save_backgrounds(prepared, out_dir / "backgrounds");
    n_backgrounds = prepared.size();
  }
  write_metadata(out_dir, app, command);

  fmt::print(out, "sources {}\nextracted {}\nkept {}\n", images.size(), tally.extracted, tally.kept);
  fmt::print(out, "discarded multi_component {}\ndiscarded too_small {}\n", tally.multi_component, tally.too_small);
  fmt::print(out, "discarded base_far_from_center {}\ndiscarded occluded {}\n", tally.base_far_from_center,
             tally.occluded);
  if (!a.backgrounds.empty()) fmt::print(out, "backgrounds {}\n", n_backgrounds);
  return 0;
}

int cmd_generate(const Shared& shared, const GenerateArgs& a, const CLI::App& app, const CLI::App& command,
                 std::ostream& out) {
  std::vector<std::string> errors;
  require_shared(errors, shared);
  require_dir(errors, "--bank", a.bank);
  require_dir(errors, "--backgrounds", a.backgrounds);
  if (a.count < 1) errors.push_back(fmt::format("--count must be >= 1 (got {})", a.count));
  const bool naive = a.kind == "naive";
  if (!naive && a.kind != "structured") {
    errors.push_back(fmt::format("--kind '{}' is not one of structured, naive", a.kind));
  }
  std::optional<SubsetTag> tag;
  if (a.preset == "A1" || a.preset == "A2" || a.preset == "A3" || a.preset == "A4") {
    tag = parse_subset_tag(a.preset);
  } else {
    errors.push_back(fmt::format("--preset '{}' is not one of A1, A2, A3, A4", a.preset));
  }

  static constexpr const char* kStructuredOnly[] = {
      "--train-w",       "--train-h",      "--center-x",    "--center-y",      "--center-delta-w", "--center-delta-h",
      "--within-mean",   "--within-jitter", "--offset-base", "--offset-jitter", "--scale-jitter",   "--zero-jitter",
      "--order-by-area"};
  static constexpr const char* kNaiveOnly[] = {"--canvas-w", "--canvas-h", "--prescale", "--scale-min", "--scale-max"};
  auto reject_foreign = [&](const auto& flags, const char* kind) {
    for (const char* flag : flags) {
      if (command.get_option(flag)->count() > 0) {
        errors.push_back(fmt::format("{} does not apply to {} generation", flag, kind));
      }
    }
  };
  if (naive) {
    reject_foreign(kStructuredOnly, "naive");
  } else {
    reject_foreign(kNaiveOnly, "structured");
  }

  BatchRequest req;
  req.kind = naive ? GeneratorKind::naive : GeneratorKind::structured;
  req.count = static_cast<std::size_t>(std::max(a.count, 1LL));
  req.global_seed = shared.seed;
  req.workers = shared.workers;
  req.out_dir = shared.out;
  if (tag) req.subset = SubsetParams::preset(*tag);
  SubsetParams& s = req.subset;
  apply(s.train_w, a.train_w);
  apply(s.train_h, a.train_h);
  apply(s.center.x, a.center_x);
  apply(s.center.y, a.center_y);
  apply(s.center_delta_w, a.center_delta_w);
  apply(s.center_delta_h, a.center_delta_h);
  if (a.zero_jitter) s.schedule = AngleSchedule::zero_jitter();
  apply(s.schedule.within_mean, a.within_mean);
  apply(s.schedule.within_jitter, a.within_jitter);
  apply(s.schedule.offset_base, a.offset_base);
  apply(s.schedule.offset_jitter, a.offset_jitter);
  apply(s.scale_jitter, a.scale_jitter);
  s.order_by_area_desc = a.order_by_area;
  NaiveParams& nv = req.naive;
  apply(nv.canvas_w, a.canvas_w);
  apply(nv.canvas_h, a.canvas_h);
  apply(nv.prescale_longest_dim, a.prescale);
  apply(nv.scale_min, a.scale_min);
  apply(nv.scale_max, a.scale_max);
  if (naive) {
    apply(nv.leaves_min, a.leaves_min);
    apply(nv.leaves_max, a.leaves_max);
    apply(nv.min_visible, a.min_visible);
    for (const auto& e : nv.validate()) errors.push_back(e);
  } else {
    apply(s.leaves_min, a.leaves_min);
    apply(s.leaves_max, a.leaves_max);
    apply(s.min_visible, a.min_visible);
    if (tag) {
      for (const auto& e : s.validate()) errors.push_back(e);
    }
  }
  check(errors);

  const LeafBank bank = load_bank(a.bank);
  const std::vector<Background> backgrounds = load_backgrounds(a.backgrounds);
  const BatchSummary summary = generate_batch(req, bank, backgrounds);
  write_metadata(shared.out, app, command);

  fmt::print(out, "generated {} {} scenes into {} (seed {}, workers {})\n", summary.images, a.kind, shared.out,
             shared.seed, shared.workers);
  if (naive) {
    fmt::print(out, "canvas {}x{}, leaves {}-{}, scale {}-{}, prescale {}\n", nv.canvas_w, nv.canvas_h, nv.leaves_min,
               nv.leaves_max, nv.scale_min, nv.scale_max, nv.prescale_longest_dim);
  } else {
    fmt::print(out, "preset {}: canvas {}x{}, center ({},{}) +- {}x{}, leaves {}-{}\n", a.preset, s.train_w,
               s.train_h, s.center.x, s.center.y, s.center_delta_w, s.center_delta_h, s.leaves_min, s.leaves_max);
  }
  long long visible = 0;
  for (int c : summary.counts) visible += c;
  fmt::print(out, "visible leaves {}\n", visible);
  return 0;
}

int cmd_evaluate(const Shared& shared, const EvaluateArgs& a, const CLI::App& app, const CLI::App& command,
                 std::ostream& out, std::ostream& err) {
  std::vector<std::string> errors;
  require_shared(errors, shared);
  require_dir(errors, "--pred", a.pred);
  require_dir(errors, "--gt", a.gt);
  if (a.suffix.empty()) errors.push_back("--suffix must not be empty");
  check(errors);

  const MetricsReport report = evaluate_dataset(a.pred, a.gt, a.suffix, shared.workers);
  write_report(report, shared.out);
  write_metadata(shared.out, app, command);
  for (const auto& name : report.missing_pred) fmt::print(err, "missing prediction: {}\n", name);
  for (const auto& name : report.missing_gt) fmt::print(err, "missing ground truth: {}\n", name);

  fmt::print(out, "images {}\nBestDice {}\nFgBgDice {}\nDiffFG {}\nAbsDiffFG {}\n", report.images.size(),
             format_metric(report.mean_best_dice), format_metric(report.mean_fgbg_dice),
             format_metric(report.mean_diff_fg), format_metric(report.mean_abs_diff_fg));
  return report.complete() ? 0 : 1;
}

std::string scene_prefix(std::string path) {
  for (std::string_view suffix : {"_rgb.png", "_label.png", "_fg.png", "_manifest.json"}) {
    if (path.ends_with(suffix)) return path.substr(0, path.size() - suffix.size());
  }
  return path;
}

int cmd_inspect(const Shared& shared, const InspectArgs& a, const CLI::App& app, const CLI::App& command,
                std::ostream& out) {
  std::vector<std::string> errors;
  require_shared(errors, shared);
  const std::string prefix = scene_prefix(a.scene);
  if (a.scene.empty()) {
    errors.push_back("--scene is required");
  } else {
    for (const char* suffix : {"_rgb.png", "_label.png"}) {
      if (!fs::is_regular_file(prefix + suffix)) errors.push_back(fmt::format("missing scene file '{}{}'", prefix, suffix));
    }
  }
  check(errors);

  const RgbImage rgb = png::read_rgb(prefix + "_rgb.png");
  const LabelImage labels = png::read_labels(prefix + "_label.png");
  const RgbImage overlay = render_overlay(rgb, labels);
  const fs::path out_dir = shared.out;
  const fs::path target = out_dir / (fs::path(prefix).filename().string() + "_overlay.png");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(Errc::io, fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));
  png::write_rgb(target, overlay);
  write_metadata(out_dir, app, command);
  fmt::print(out, "overlay {} ({}x{}, {} leaves, {} boundary px)\n", target.string(), overlay.width(),
             overlay.height(), distinct_labels(labels).size(), count_on(label_transitions(labels)));
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthetic leaf-collage datasets: bank building, generation, evaluation and inspection", "collage"};
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "INI/TOML file; sections [ingest], [generate], [evaluate], [inspect]");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();

  Shared shared;
  app.add_option("--seed", shared.seed, "Global seed");
  app.add_option("--workers", shared.workers, "Worker threads (never changes outputs)")->configurable(false);
  app.add_option("--out", shared.out, "Output directory");

  IngestArgs ingest;
  CLI::App* ing = app.add_subcommand("ingest", "Build a leaf bank (and optionally backgrounds) from annotated images");
  ing->add_option("--source", ingest.source, "Directory of {id}_rgb.png / {id}_label.png pairs");
  ing->add_option("--subset", ingest.subset, "Subset tag: A1, A2, A3, A4 or custom");
  ing->add_option("--kind", ingest.kind, "structured (aligned) or naive (prescaled)");
  ing->add_option("--base-dist-frac", ingest.base_dist_frac, "Max leaf base distance, fraction of image diagonal");
  ing->add_option("--occlusion-frac", ingest.occlusion_frac, "Max occluded boundary fraction");
  ing->add_option("--min-area", ingest.min_area, "Min leaf area in pixels");
  ing->add_option("--prescale", ingest.prescale, "Naive banks: longest side after prescale");
  ing->add_option("--backgrounds", ingest.backgrounds, "Directory of background PNGs to crop");
  ing->add_option("--bg-width", ingest.bg_width, "Background width (default: canvas of the subset or kind)");
  ing->add_option("--bg-height", ingest.bg_height, "Background height");
  ing->add_option("--bg-crop", ingest.bg_crop, "center or random");
  ing->add_flag("--bg-resize", ingest.bg_resize, "Upscale backgrounds smaller than the canvas");

  GenerateArgs gen;
  CLI::App* g = app.add_subcommand("generate", "Generate a synthetic dataset");
  g->add_option("--bank", gen.bank, "Leaf bank directory");
  g->add_option("--backgrounds", gen.backgrounds, "Prepared background directory");
  g->add_option("--kind", gen.kind, "structured or naive");
  g->add_option("--preset", gen.preset, "Structured preset: A1, A2, A3 or A4");
  g->add_option("--count", gen.count, "Number of scenes");
  g->add_option("--train-w", gen.train_w);
  g->add_option("--train-h", gen.train_h);
  g->add_option("--center-x", gen.center_x);
  g->add_option("--center-y", gen.center_y);
  g->add_option("--center-delta-w", gen.center_delta_w);
  g->add_option("--center-delta-h", gen.center_delta_h);
  g->add_option("--leaves-min", gen.leaves_min);
  g->add_option("--leaves-max", gen.leaves_max);
  g->add_option("--min-visible", gen.min_visible, "Drop leaves with fewer visible pixels");
  g->add_option("--within-mean", gen.within_mean);
  g->add_option("--within-jitter", gen.within_jitter);
  g->add_option("--offset-base", gen.offset_base);
  g->add_option("--offset-jitter", gen.offset_jitter);
  g->add_option("--scale-jitter", gen.scale_jitter);
  g->add_flag("--zero-jitter", gen.zero_jitter, "Deterministic angle steps");
  g->add_flag("--order-by-area", gen.order_by_area, "Place larger leaves first");
  g->add_option("--canvas-w", gen.canvas_w);
  g->add_option("--canvas-h", gen.canvas_h);
  g->add_option("--prescale", gen.prescale);
  g->add_option("--scale-min", gen.scale_min);
  g->add_option("--scale-max", gen.scale_max);

  EvaluateArgs eval;
  CLI::App* ev = app.add_subcommand("evaluate", "Score predicted label masks against ground truth");
  ev->add_option("--pred", eval.pred, "Prediction directory");
  ev->add_option("--gt", eval.gt, "Ground-truth directory");
  ev->add_option("--suffix", eval.suffix, "Label file suffix used for pairing");

  InspectArgs insp;
  CLI::App* in = app.add_subcommand("inspect", "Write a boundary overlay for one scene");
  in->add_option("--scene", insp.scene, "Scene path prefix {dir}/{id} or any of its files");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (ing->parsed()) return cmd_ingest(shared, ingest, app, *ing, out);
    if (g->parsed()) return cmd_generate(shared, gen, app, *g, out);
    if (ev->parsed()) return cmd_evaluate(shared, eval, app, *ev, out, err);
    return cmd_inspect(shared, insp, app, *in, out);
  } catch (const ValidationFailed& v) {
    for (const auto& e : v.errors) fmt::print(err, "error: {}\n", e);
    return 2;
  } catch (const Error& e) {
    fmt::print(err, "error ({}): {}\n", to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 1;
  }
}

}  // namespace collage::cli
