#include "collage/leafbank.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "collage/dataset_io.hpp"
#include "collage/error.hpp"
#include "collage/kernels.hpp"
#include "collage/png_io.hpp"
#include "collage/raster.hpp"

namespace collage {

std::string_view to_string(SubsetTag tag) {
  switch (tag) {
    case SubsetTag::A1: return "A1";
    case SubsetTag::A2: return "A2";
    case SubsetTag::A3: return "A3";
    case SubsetTag::A4: return "A4";
    case SubsetTag::custom: return "custom";
  }
  return "custom";
}

SubsetTag parse_subset_tag(std::string_view text) {
  if (text == "A1") return SubsetTag::A1;
  if (text == "A2") return SubsetTag::A2;
  if (text == "A3") return SubsetTag::A3;
  if (text == "A4") return SubsetTag::A4;
  if (text == "custom") return SubsetTag::custom;
  fail(Errc::configuration, fmt::format("unknown subset tag '{}'", text));
}

std::string_view to_string(DiscardReason reason) {
  switch (reason) {
    case DiscardReason::multi_component: return "multi_component";
    case DiscardReason::too_small: return "too_small";
    case DiscardReason::base_far_from_center: return "base_far_from_center";
    case DiscardReason::occluded: return "occluded";
  }
  return "unknown";
}

std::string_view to_string(BankKind kind) {
  return kind == BankKind::structured ? "structured" : "naive";
}

Pixel AnnotatedImage::effective_center() const {
  if (plant_center) return *plant_center;
  double sx = 0.0, sy = 0.0;
  std::int64_t n = 0;
  for (int y = 0; y < labels.height(); ++y) {
    const auto row = labels.row(y);
    for (int x = 0; x < labels.width(); ++x) {
      if (row[x] == 0) continue;
      sx += x;
      sy += y;
      ++n;
    }
  }
  if (n == 0) return {labels.width() / 2, labels.height() / 2};
  return {static_cast<int>(std::lround(sx / n)), static_cast<int>(std::lround(sy / n))};
}

std::string cutout_id(std::string_view source_id, Label label) {
  return fmt::format("{}_{}", source_id, label);
}

std::string LeafCutout::id() const { return cutout_id(provenance.source_id, provenance.label); }

std::vector<LeafCutout> extract_leaves(const AnnotatedImage& img) {
  if (!same_shape(img.pixels, img.labels)) {
    fail(Errc::invalid_input,
         fmt::format("extract_leaves: '{}' has {}x{} pixels but {}x{} labels", img.source_id,
                     img.pixels.width(), img.pixels.height(), img.labels.width(),
                     img.labels.height()));
  }

  struct Box {
    int x0 = 0, y0 = 0, x1 = -1, y1 = -1;
  };
  std::map<Label, Box> boxes;
  for (int y = 0; y < img.labels.height(); ++y) {
    const auto row = img.labels.row(y);
    for (int x = 0; x < img.labels.width(); ++x) {
      const Label l = row[x];
      if (l == 0) continue;
      auto [it, inserted] = boxes.try_emplace(l, Box{x, y, x, y});
      if (!inserted) {
        Box& b = it->second;
        b.x0 = std::min(b.x0, x);
        b.x1 = std::max(b.x1, x);
        b.y0 = std::min(b.y0, y);
        b.y1 = std::max(b.y1, y);
      }
    }
  }
  if (boxes.empty()) {
    fail(Errc::empty_extraction, fmt::format("extract_leaves: '{}' has no leaf labels", img.source_id));
  }

  const Pixel center = img.effective_center();
  std::vector<LeafCutout> out;
  out.reserve(boxes.size());
  for (const auto& [label, box] : boxes) {
    LeafCutout c;
    c.pixels = RgbaImage(box.x1 - box.x0 + 1, box.y1 - box.y0 + 1);
    c.source_origin = {box.x0, box.y0};
    c.provenance = {img.source_id, label};
    c.subset = img.subset;
    for (int y = box.y0; y <= box.y1; ++y) {
      for (int x = box.x0; x <= box.x1; ++x) {
        if (img.labels.at(x, y) != label) continue;
        const Rgb p = img.pixels.at(x, y);
        c.pixels.at(x - box.x0, y - box.y0) = {p.r, p.g, p.b, kAlphaOpaque};
        ++c.area_px;
      }
    }
    c.anchor = nearest_point(alpha_mask(c.pixels),
                             {static_cast<double>(center.x - box.x0),
                              static_cast<double>(center.y - box.y0)});
    out.push_back(std::move(c));
  }
  return out;
}

double principal_axis(const LeafCutout& cutout, Pixel plant_center) {
  const Point2d from{static_cast<double>(plant_center.x), static_cast<double>(plant_center.y)};
  const Pixel tip = farthest_point(alpha_mask(cutout.pixels), from);
  return direction_deg(from, {static_cast<double>(tip.x), static_cast<double>(tip.y)});
}

namespace {

struct AlignedRaster {
  RgbaImage pixels;
  Pixel anchor;
  std::int64_t area = 0;
  int tip_offset = 0;  // |column of farthest pixel - anchor column|
};

// Rotates the leaf about the plant center by `rotation` and crops to the
// smallest raster that keeps the center at the bottom-row middle pixel.
// `lift` moves the center vertically inside that pixel.
AlignedRaster render_aligned(const RgbaImage& src, Pixel plant_center, double rotation, double lift) {
  const Point2d pivot = center_of(plant_center);
  const AnchorWarp forward = AnchorWarp::make(pivot, {0.0, 0.0}, rotation, 1.0, 1.0);
  double half_w = 0.0, up = 0.0;
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      if (!is_opaque(src.at(x, y))) continue;
      const Point2d q = forward.to_dest(center_of(Pixel{x, y}));
      half_w = std::max(half_w, std::abs(q.x));
      up = std::max(up, -q.y);
    }
  }
  const int r = static_cast<int>(std::ceil(half_w)) + 1;
  const int h = static_cast<int>(std::ceil(up)) + 2;
  RgbaImage canvas(2 * r + 1, h);
  const Pixel anchor{r, h - 1};
  const Point2d dst{center_of(anchor).x, center_of(anchor).y + lift};
  kernels::warp_render(src, AnchorWarp::make(pivot, dst, rotation, 1.0, 1.0), canvas);

  int reach = -1;
  int top = h;
  for (int y = 0; y < canvas.height(); ++y) {
    for (int x = 0; x < canvas.width(); ++x) {
      if (!is_opaque(canvas.at(x, y))) continue;
      reach = std::max(reach, std::abs(x - anchor.x));
      top = std::min(top, y);
    }
  }
  if (reach < 0) {
    fail(Errc::degenerate_mask, "align_canonical: no leaf pixels above the plant center");
  }

  AlignedRaster out;
  out.pixels = RgbaImage(2 * reach + 1, anchor.y - top + 1);
  out.anchor = {reach, out.pixels.height() - 1};
  for (int y = 0; y < out.pixels.height(); ++y) {
    for (int x = 0; x < out.pixels.width(); ++x) {
      const Rgba p = canvas.at(x + anchor.x - reach, y + top);
      out.pixels.at(x, y) = p;
      if (is_opaque(p)) ++out.area;
    }
  }
  const Pixel tip = farthest_point(alpha_mask(out.pixels),
                                   {static_cast<double>(out.anchor.x), static_cast<double>(out.anchor.y)});
  out.tip_offset = std::abs(tip.x - out.anchor.x);
  return out;
}

}  // namespace

LeafCutout align_canonical(const LeafCutout& cutout, Pixel plant_center) {
  if (cutout.aligned) fail(Errc::contract_violation, "align_canonical: cutout is already aligned");
  if (count_on(alpha_mask(cutout.pixels)) == 0) {
    fail(Errc::degenerate_mask, "align_canonical: cutout has no leaf pixels");
  }

  // Nearest-neighbour resampling flattens blunt tips into a row of equally
  // distant pixels; search small rotations and sub-pixel lifts until the
  // farthest pixel lands on the anchor column.
  const double base = wrap_degrees(90.0 - principal_axis(cutout, plant_center));
  double best_rotation = base;
  AlignedRaster best = render_aligned(cutout.pixels, plant_center, base, 0.0);
  constexpr double kLifts[] = {0.0, -0.15, 0.15, -0.3, 0.3, -0.45, 0.45};
  for (int k = 0; k <= 40 && best.tip_offset > 1; ++k) {
    for (double sign : {1.0, -1.0}) {
      if (k == 0 && sign < 0) continue;
      const double candidate = wrap_degrees(base + sign * 0.25 * k);
      for (double lift : kLifts) {
        if (k == 0 && lift == 0.0) continue;
        AlignedRaster next = render_aligned(cutout.pixels, plant_center, candidate, lift);
        if (next.tip_offset < best.tip_offset) {
          best = std::move(next);
          best_rotation = candidate;
        }
        if (best.tip_offset <= 1) break;
      }
      if (best.tip_offset <= 1) break;
    }
  }

  LeafCutout out = cutout;
  out.pixels = std::move(best.pixels);
  out.anchor = best.anchor;
  out.area_px = best.area;
  out.aligned = true;
  out.rotation_deg = best_rotation;
  return out;
}

FilterContext make_filter_context(const AnnotatedImage& img, FilterThresholds thresholds) {
  return {thresholds, &img.labels, img.effective_center()};
}

double occluded_boundary_fraction(const LeafCutout& cutout, const LabelImage& source_labels) {
  const Label own = cutout.provenance.label;
  const RgbaImage& px = cutout.pixels;
  const auto inside = [&px](int x, int y) { return px.contains(x, y) && is_opaque(px.at(x, y)); };

  std::int64_t boundary = 0;
  std::int64_t touching = 0;
  for (int y = 0; y < px.height(); ++y) {
    for (int x = 0; x < px.width(); ++x) {
      if (!inside(x, y)) continue;
      if (inside(x - 1, y) && inside(x + 1, y) && inside(x, y - 1) && inside(x, y + 1)) continue;
      ++boundary;
      const int sx = x + cutout.source_origin.x;
      const int sy = y + cutout.source_origin.y;
      bool hit = false;
      for (int dy = -1; dy <= 1 && !hit; ++dy) {
        for (int dx = -1; dx <= 1 && !hit; ++dx) {
          if ((dx == 0 && dy == 0) || !source_labels.contains(sx + dx, sy + dy)) continue;
          const Label other = source_labels.at(sx + dx, sy + dy);
          hit = other != 0 && other != own;
        }
      }
      if (hit) ++touching;
    }
  }
  return boundary == 0 ? 0.0 : static_cast<double>(touching) / static_cast<double>(boundary);
}

FilterReport filter_leaves(const std::vector<LeafCutout>& cutouts, const FilterContext& ctx) {
  FilterReport report;
  if (cutouts.empty()) return report;
  if (ctx.source_labels == nullptr) {
    fail(Errc::invalid_input, "filter_leaves: source labels are required");
  }
  const LabelImage& src = *ctx.source_labels;
  const double diagonal = std::hypot(static_cast<double>(src.width()), static_cast<double>(src.height()));
  const double max_base_dist = ctx.thresholds.base_dist_frac * diagonal;

  for (const LeafCutout& c : cutouts) {
    const Mask mask = alpha_mask(c.pixels);
    std::optional<DiscardReason> reason;
    if (connected_components(mask).count > 1) {
      reason = DiscardReason::multi_component;
    } else if (c.area_px < ctx.thresholds.min_area) {
      reason = DiscardReason::too_small;
    } else {
      const Point2d center{static_cast<double>(ctx.plant_center.x - c.source_origin.x),
                           static_cast<double>(ctx.plant_center.y - c.source_origin.y)};
      const Pixel base = nearest_point(mask, center);
      if (std::hypot(base.x - center.x, base.y - center.y) > max_base_dist) {
        reason = DiscardReason::base_far_from_center;
      } else if (occluded_boundary_fraction(c, src) > ctx.thresholds.occlusion_frac) {
        reason = DiscardReason::occluded;
      }
    }
    if (reason) {
      report.discarded.emplace_back(c.id(), *reason);
    } else {
      report.kept.push_back(c.id());
    }
  }
  return report;
}

void BankTally::add(const FilterReport& report) {
  extracted += report.kept.size() + report.discarded.size();
  kept += report.kept.size();
  for (const auto& [id, reason] : report.discarded) {
    switch (reason) {
      case DiscardReason::multi_component: ++multi_component; break;
      case DiscardReason::too_small: ++too_small; break;
      case DiscardReason::base_far_from_center: ++base_far_from_center; break;
      case DiscardReason::occluded: ++occluded; break;
    }
  }
}

LeafCutout prescale_leaf(const LeafCutout& cutout, int longest) {
  const int current = std::max(cutout.pixels.width(), cutout.pixels.height());
  if (current <= 0 || longest <= 0) fail(Errc::degenerate_scale, "prescale_leaf: empty cutout");
  const double s = static_cast<double>(longest) / current;

  LeafCutout out = cutout;
  out.pixels = scale(cutout.pixels, s, s);
  const Mask mask = alpha_mask(out.pixels);
  out.area_px = static_cast<std::int64_t>(count_on(mask));
  if (out.area_px == 0) fail(Errc::degenerate_mask, "prescale_leaf: leaf vanished when resized");

  double cx = 0.0, cy = 0.0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y) == 0) continue;
      cx += x;
      cy += y;
    }
  }
  out.anchor = nearest_point(mask, {cx / out.area_px, cy / out.area_px});
  out.aligned = false;
  return out;
}

LeafBank build_bank(const std::vector<AnnotatedImage>& images, const BankOptions& options,
                    BankTally* tally) {
  LeafBank bank;
  bank.kind = options.kind;
  for (const AnnotatedImage& img : images) {
    if (distinct_labels(img.labels).empty()) continue;
    const std::vector<LeafCutout> cutouts = extract_leaves(img);
    const FilterContext ctx = make_filter_context(img, options.thresholds);
    FilterReport report = filter_leaves(cutouts, ctx);

    std::vector<std::string> kept;
    for (const LeafCutout& c : cutouts) {
      if (std::find(report.kept.begin(), report.kept.end(), c.id()) == report.kept.end()) continue;
      if (options.kind == BankKind::structured) {
        const Pixel local{ctx.plant_center.x - c.source_origin.x, ctx.plant_center.y - c.source_origin.y};
        bank.leaves.push_back(align_canonical(c, local));
        kept.push_back(c.id());
        continue;
      }
      const int longest = std::max(c.pixels.width(), c.pixels.height());
      if (static_cast<double>(options.prescale_longest_dim) / longest > 16.0) {
        // Would need more than the supported 16x upscale.
        report.discarded.emplace_back(c.id(), DiscardReason::too_small);
        continue;
      }
      bank.leaves.push_back(prescale_leaf(c, options.prescale_longest_dim));
      kept.push_back(c.id());
    }
    report.kept = std::move(kept);
    if (tally) tally->add(report);
  }
  return bank;
}

void save_bank(const LeafBank& bank, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(Errc::io, fmt::format("cannot create bank directory '{}': {}", dir.string(), ec.message()));

  std::string index(kBankIndexHeader);
  index += '\n';
  for (const LeafCutout& c : bank.leaves) {
    png::write_rgba(dir / (c.id() + ".png"), c.pixels);
    index += fmt::format("{},{},{},{},{},{},{},{}\n", c.id(), c.provenance.source_id,
                         c.provenance.label, to_string(c.subset), c.anchor.x, c.anchor.y, c.area_px,
                         c.aligned ? 1 : 0);
  }
  write_text_file(dir / "index.csv", index);
}

LeafBank load_bank(const std::filesystem::path& dir) {
  const CsvTable table = read_csv(dir / "index.csv");
  if (table.header.size() != 8 ||
      fmt::format("{}", fmt::join(table.header, ",")) != kBankIndexHeader) {
    fail(Errc::ingestion, fmt::format("'{}' does not have the bank index header", (dir / "index.csv").string()));
  }
  LeafBank bank;
  bool all_aligned = true;
  for (const auto& row : table.rows) {
    LeafCutout c;
    try {
      c.provenance = {row[1], static_cast<Label>(std::stoul(row[2]))};
      c.subset = parse_subset_tag(row[3]);
      c.anchor = {std::stoi(row[4]), std::stoi(row[5])};
      c.area_px = std::stoll(row[6]);
      c.aligned = row[7] == "1";
    } catch (const std::logic_error&) {
      fail(Errc::ingestion, fmt::format("bad bank index row for '{}'", row[0]));
    }
    c.pixels = png::read_rgba(dir / (row[0] + ".png"));
    if (!c.pixels.contains(c.anchor)) {
      fail(Errc::ingestion, fmt::format("bank leaf '{}' has its anchor outside the raster", row[0]));
    }
    all_aligned = all_aligned && c.aligned;
    bank.leaves.push_back(std::move(c));
  }
  bank.kind = all_aligned ? BankKind::structured : BankKind::naive;
  return bank;
}

}  // namespace collage
