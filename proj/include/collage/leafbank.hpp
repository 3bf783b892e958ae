#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "collage/image.hpp"

namespace collage {

enum class SubsetTag { A1, A2, A3, A4, custom };

std::string_view to_string(SubsetTag tag);
SubsetTag parse_subset_tag(std::string_view text);

struct AnnotatedImage {
  RgbImage pixels;
  LabelImage labels;
  std::optional<Pixel> plant_center;
  std::string source_id;
  SubsetTag subset = SubsetTag::custom;

  // Manual mark if present, otherwise the rounded foreground centroid.
  Pixel effective_center() const;
};

struct Provenance {
  std::string source_id;
  Label label = 0;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct LeafCutout {
  RgbaImage pixels;  // alpha is 0 or 255
  Pixel anchor;      // raster coordinates
  Provenance provenance;
  SubsetTag subset = SubsetTag::custom;
  bool aligned = false;
  std::int64_t area_px = 0;
  // Offset of pixels(0,0) in the source image. Meaningful only before alignment.
  Pixel source_origin;
  // Rotation applied by align_canonical, degrees.
  double rotation_deg = 0.0;

  std::string id() const;  // "{source_id}_{label}"
};

std::string cutout_id(std::string_view source_id, Label label);

// One tight-bbox cutout per distinct nonzero label, ascending label order.
// Anchors start at the leaf pixel nearest the plant center.
std::vector<LeafCutout> extract_leaves(const AnnotatedImage& img);

// Degrees in [0, 360) from plant_center (cutout raster coordinates) to the
// farthest leaf pixel.
double principal_axis(const LeafCutout& cutout, Pixel plant_center);

// Rotates the leaf so the center-to-tip axis points up and crops so that the
// plant center becomes the bottom-row central pixel.
LeafCutout align_canonical(const LeafCutout& cutout, Pixel plant_center);

enum class DiscardReason { multi_component, too_small, base_far_from_center, occluded };

std::string_view to_string(DiscardReason reason);

struct FilterThresholds {
  double base_dist_frac = 0.15;  // of the source image diagonal
  double occlusion_frac = 0.05;  // of boundary pixels touching another instance
  std::int64_t min_area = 100;
};

// Everything filter_leaves needs to know about where the cutouts came from.
struct FilterContext {
  FilterThresholds thresholds;
  const LabelImage* source_labels = nullptr;  // required for the occlusion test
  Pixel plant_center;
};

FilterContext make_filter_context(const AnnotatedImage& img, FilterThresholds thresholds);

struct FilterReport {
  std::vector<std::string> kept;
  std::vector<std::pair<std::string, DiscardReason>> discarded;
};

// Criteria are tried in the order multi_component, too_small,
// base_far_from_center, occluded; the first failure is the reason.
FilterReport filter_leaves(const std::vector<LeafCutout>& cutouts, const FilterContext& ctx);

// Fraction of the leaf's boundary pixels that are 8-adjacent to a different
// nonzero label in the source.
double occluded_boundary_fraction(const LeafCutout& cutout, const LabelImage& source_labels);

enum class BankKind { structured, naive };

std::string_view to_string(BankKind kind);

struct BankOptions {
  BankKind kind = BankKind::structured;
  FilterThresholds thresholds;
  int prescale_longest_dim = 600;  // naive banks only
};

struct BankTally {
  std::size_t extracted = 0;
  std::size_t kept = 0;
  std::size_t multi_component = 0;
  std::size_t too_small = 0;
  std::size_t base_far_from_center = 0;
  std::size_t occluded = 0;

  void add(const FilterReport& report);
};

struct LeafBank {
  BankKind kind = BankKind::structured;
  std::vector<LeafCutout> leaves;

  bool empty() const noexcept { return leaves.empty(); }
  std::size_t size() const noexcept { return leaves.size(); }
};

// Extract, filter and then align (structured) or prescale (naive) the
// survivors of every source image. Images without leaves are skipped.
LeafBank build_bank(const std::vector<AnnotatedImage>& images, const BankOptions& options,
                    BankTally* tally = nullptr);

// Resizes to `longest` pixels on the longer side, aspect preserved; anchor is
// moved to the leaf pixel nearest the resized mask centroid.
LeafCutout prescale_leaf(const LeafCutout& cutout, int longest);

// Bank directory: one RGBA PNG per leaf named {id}.png plus index.csv.
inline constexpr std::string_view kBankIndexHeader =
    "id,source_id,label,subset_tag,anchor_x,anchor_y,area_px,aligned";

void save_bank(const LeafBank& bank, const std::filesystem::path& dir);
LeafBank load_bank(const std::filesystem::path& dir);

}  // namespace collage
