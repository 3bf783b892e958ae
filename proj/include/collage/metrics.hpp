#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "collage/image.hpp"

namespace collage {

// 2|A n B| / (|A| + |B|); 1 when both are empty.
double dice(const Mask& a, const Mask& b);

struct BestDice {
  double pred_to_gt = 0.0;  // mean over gt instances of best pred match
  double gt_to_pred = 0.0;  // mean over pred instances of best gt match
  double symmetric = 0.0;   // min of the two
};

BestDice best_dice(const LabelImage& pred, const LabelImage& gt);
double fgbg_dice(const LabelImage& pred, const LabelImage& gt);

struct CountDiff {
  int diff_fg = 0;
  int abs_diff_fg = 0;
};

int instance_count(const LabelImage& labels);
CountDiff count_diffs(const LabelImage& pred, const LabelImage& gt);

struct Detection {
  int detected = 0;
  int missed = 0;
};

// Ground-truth leaves larger than min_area are detected when a prediction
// reaches iou_thresh with them; predictions are matched one-to-one, greedily
// by descending IOU.
Detection iou_detection_eval(const LabelImage& pred, const LabelImage& gt,
                             double iou_thresh = 0.8, std::int64_t min_area = 700);

struct ImageMetrics {
  std::string image_id;
  double best_dice = 0.0;  // symmetric
  double bd_pred_to_gt = 0.0;
  double bd_gt_to_pred = 0.0;
  double fgbg_dice = 0.0;
  int diff_fg = 0;
  int abs_diff_fg = 0;
};

ImageMetrics evaluate_pair(std::string image_id, const LabelImage& pred, const LabelImage& gt);

struct MetricsReport {
  std::vector<ImageMetrics> images;
  std::vector<std::string> missing_pred;  // gt files with no prediction
  std::vector<std::string> missing_gt;    // predictions with no ground truth

  double mean_best_dice = 0.0;
  double mean_fgbg_dice = 0.0;
  double mean_diff_fg = 0.0;
  double mean_abs_diff_fg = 0.0;

  bool complete() const noexcept { return missing_pred.empty() && missing_gt.empty(); }
};

void aggregate(MetricsReport& report);

// Pairs label PNGs ending in `suffix` by file name across the two trees.
MetricsReport evaluate_dataset(const std::filesystem::path& pred_dir,
                               const std::filesystem::path& gt_dir,
                               const std::string& suffix = "_label.png", int workers = 1);

inline constexpr const char* kReportHeader = "image_id,best_dice,fgbg_dice,diff_fg,abs_diff_fg";
inline constexpr const char* kAggregateHeader = "images,best_dice,fgbg_dice,diff_fg,abs_diff_fg";

// metrics.csv, metrics_aggregate.csv and metrics_directional.csv.
void write_report(const MetricsReport& report, const std::filesystem::path& out_dir);

std::string format_metric(double value);

}  // namespace collage
