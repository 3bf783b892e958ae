#include "collage/metrics.hpp"

#include <fmt/format.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>
#include <tuple>

#include "collage/dataset_io.hpp"
#include "collage/error.hpp"
#include "collage/kernels.hpp"
#include "collage/png_io.hpp"

namespace fs = std::filesystem;

namespace collage {
namespace {

void require_same_shape(const LabelImage& a, const LabelImage& b, std::string_view op) {
  if (!same_shape(a, b)) {
    fail(Errc::invalid_input, fmt::format("{}: {}x{} vs {}x{}", op, a.width(), a.height(), b.width(), b.height()));
  }
}

double dice_from_counts(std::int64_t inter, std::int64_t a, std::int64_t b) {
  if (a + b == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(a + b);
}

// Mean over the instances of `outer` of the best Dice against any instance of
// the other side. Rows of the table are pred, columns gt.
double directional_best_dice(const OverlapTable& t, bool outer_is_gt) {
  const std::size_t n_outer = outer_is_gt ? t.b_labels.size() : t.a_labels.size();
  const std::size_t n_inner = outer_is_gt ? t.a_labels.size() : t.b_labels.size();
  if (n_outer == 0 && n_inner == 0) return 1.0;
  if (n_outer == 0 || n_inner == 0) return 0.0;

  double sum = 0.0;
  for (std::size_t o = 1; o <= n_outer; ++o) {
    const std::int64_t outer_area = outer_is_gt ? t.b_area(o) : t.a_area(o);
    double best = 0.0;
    for (std::size_t i = 1; i <= n_inner; ++i) {
      const std::int64_t inter = outer_is_gt ? t.at(i, o) : t.at(o, i);
      const std::int64_t inner_area = outer_is_gt ? t.a_area(i) : t.b_area(i);
      best = std::max(best, dice_from_counts(inter, outer_area, inner_area));
    }
    sum += best;
  }
  return sum / static_cast<double>(n_outer);
}

}  // namespace

double dice(const Mask& a, const Mask& b) {
  if (!same_shape(a, b)) fail(Errc::invalid_input, "dice: masks differ in size");
  std::int64_t inter = 0, na = 0, nb = 0;
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const bool x = pa[i] != 0;
    const bool y = pb[i] != 0;
    na += x;
    nb += y;
    inter += x && y;
  }
  return dice_from_counts(inter, na, nb);
}

BestDice best_dice(const LabelImage& pred, const LabelImage& gt) {
  require_same_shape(pred, gt, "best_dice");
  const OverlapTable t = kernels::overlap(pred, gt);
  BestDice out;
  out.pred_to_gt = directional_best_dice(t, true);
  out.gt_to_pred = directional_best_dice(t, false);
  out.symmetric = std::min(out.pred_to_gt, out.gt_to_pred);
  return out;
}

double fgbg_dice(const LabelImage& pred, const LabelImage& gt) {
  require_same_shape(pred, gt, "fgbg_dice");
  return dice(foreground(pred), foreground(gt));
}

int instance_count(const LabelImage& labels) { return static_cast<int>(distinct_labels(labels).size()); }

CountDiff count_diffs(const LabelImage& pred, const LabelImage& gt) {
  const int d = instance_count(pred) - instance_count(gt);
  return {d, std::abs(d)};
}

Detection iou_detection_eval(const LabelImage& pred, const LabelImage& gt, double iou_thresh,
                             std::int64_t min_area) {
  require_same_shape(pred, gt, "iou_detection_eval");
  const OverlapTable t = kernels::overlap(pred, gt);

  struct Candidate {
    double iou;
    std::size_t gt, pred;
  };
  std::vector<Candidate> candidates;
  std::vector<std::size_t> eligible;
  for (std::size_t g = 1; g <= t.b_labels.size(); ++g) {
    const std::int64_t g_area = t.b_area(g);
    if (g_area <= min_area) continue;
    eligible.push_back(g);
    for (std::size_t p = 1; p <= t.a_labels.size(); ++p) {
      const std::int64_t inter = t.at(p, g);
      if (inter == 0) continue;
      const double iou = static_cast<double>(inter) / static_cast<double>(g_area + t.a_area(p) - inter);
      // Slack keeps ratios like 800/1000 from missing an exact 0.8 threshold.
      if (iou >= iou_thresh - 1e-12) candidates.push_back({iou, g, p});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(b.iou, a.gt, a.pred) < std::tie(a.iou, b.gt, b.pred);
  });

  std::set<std::size_t> used_gt, used_pred;
  for (const Candidate& c : candidates) {
    if (used_gt.count(c.gt) || used_pred.count(c.pred)) continue;
    used_gt.insert(c.gt);
    used_pred.insert(c.pred);
  }
  Detection d;
  d.detected = static_cast<int>(used_gt.size());
  d.missed = static_cast<int>(eligible.size() - used_gt.size());
  return d;
}

ImageMetrics evaluate_pair(std::string image_id, const LabelImage& pred, const LabelImage& gt) {
  require_same_shape(pred, gt, "evaluate_pair");
  ImageMetrics m;
  m.image_id = std::move(image_id);
  const BestDice bd = best_dice(pred, gt);
  m.best_dice = bd.symmetric;
  m.bd_pred_to_gt = bd.pred_to_gt;
  m.bd_gt_to_pred = bd.gt_to_pred;
  m.fgbg_dice = fgbg_dice(pred, gt);
  const CountDiff cd = count_diffs(pred, gt);
  m.diff_fg = cd.diff_fg;
  m.abs_diff_fg = cd.abs_diff_fg;
  return m;
}

void aggregate(MetricsReport& report) {
  report.mean_best_dice = report.mean_fgbg_dice = report.mean_diff_fg = report.mean_abs_diff_fg = 0.0;
  if (report.images.empty()) return;
  for (const ImageMetrics& m : report.images) {
    report.mean_best_dice += m.best_dice;
    report.mean_fgbg_dice += m.fgbg_dice;
    report.mean_diff_fg += m.diff_fg;
    report.mean_abs_diff_fg += m.abs_diff_fg;
  }
  const double n = static_cast<double>(report.images.size());
  report.mean_best_dice /= n;
  report.mean_fgbg_dice /= n;
  report.mean_diff_fg /= n;
  report.mean_abs_diff_fg /= n;
}

namespace {

std::set<std::string> label_files(const fs::path& dir, const std::string& suffix) {
  if (!fs::is_directory(dir)) fail(Errc::evaluation, fmt::format("'{}' is not a directory", dir.string()));
  std::set<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.ends_with(suffix)) names.insert(name);
  }
  return names;
}

}  // namespace

MetricsReport evaluate_dataset(const fs::path& pred_dir, const fs::path& gt_dir, const std::string& suffix,
                               int workers) {
  const std::set<std::string> pred = label_files(pred_dir, suffix);
  const std::set<std::string> gt = label_files(gt_dir, suffix);

  MetricsReport report;
  std::vector<std::string> common;
  std::set_intersection(pred.begin(), pred.end(), gt.begin(), gt.end(), std::back_inserter(common));
  std::set_difference(gt.begin(), gt.end(), pred.begin(), pred.end(), std::back_inserter(report.missing_pred));
  std::set_difference(pred.begin(), pred.end(), gt.begin(), gt.end(), std::back_inserter(report.missing_gt));
  if (common.empty()) {
    fail(Errc::evaluation, fmt::format("no '*{}' files shared by '{}' and '{}'", suffix, pred_dir.string(),
                                       gt_dir.string()));
  }

  report.images.resize(common.size());
  std::vector<std::exception_ptr> errors(common.size());
  const auto n = static_cast<std::int64_t>(common.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(workers, 1))
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      const std::string& name = common[k];
      const LabelImage p = png::read_labels(pred_dir / name);
      const LabelImage g = png::read_labels(gt_dir / name);
      if (!same_shape(p, g)) {
        fail(Errc::evaluation, fmt::format("'{}': prediction is {}x{}, ground truth {}x{}", name, p.width(),
                                           p.height(), g.width(), g.height()));
      }
      report.images[k] = evaluate_pair(name.substr(0, name.size() - suffix.size()), p, g);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  aggregate(report);
  return report;
}

std::string format_metric(double value) { return fmt::format("{:.6f}", value); }

void write_report(const MetricsReport& report, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(Errc::io, fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));

  std::string per_image = std::string(kReportHeader) + "\n";
  std::string directional = "image_id,bd_pred_to_gt,bd_gt_to_pred\n";
  for (const ImageMetrics& m : report.images) {
    per_image += fmt::format("{},{},{},{},{}\n", m.image_id, format_metric(m.best_dice), format_metric(m.fgbg_dice),
                             m.diff_fg, m.abs_diff_fg);
    directional += fmt::format("{},{},{}\n", m.image_id, format_metric(m.bd_pred_to_gt), format_metric(m.bd_gt_to_pred));
  }
  write_text_file(out_dir / "metrics.csv", per_image);
  write_text_file(out_dir / "metrics_directional.csv", directional);
  write_text_file(out_dir / "metrics_aggregate.csv",
                  fmt::format("{}\n{},{},{},{},{}\n", kAggregateHeader, report.images.size(),
                              format_metric(report.mean_best_dice), format_metric(report.mean_fgbg_dice),
                              format_metric(report.mean_diff_fg), format_metric(report.mean_abs_diff_fg)));
}

}  // namespace collage
