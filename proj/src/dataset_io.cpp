#include "collage/dataset_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "collage/error.hpp"
#include "collage/kernels.hpp"
#include "collage/png_io.hpp"
#include "collage/raster.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace collage {

std::string source_id_from_path(const fs::path& rgb_path) {
  std::string stem = rgb_path.stem().string();
  constexpr std::string_view suffix = "_rgb";
  if (stem.size() > suffix.size() && stem.ends_with(suffix)) stem.resize(stem.size() - suffix.size());
  return stem;
}

AnnotatedImage load_annotated(const SourceRecord& rec) {
  AnnotatedImage img;
  img.pixels = png::read_rgb(rec.rgb_path);
  img.labels = png::read_labels(rec.label_path);
  if (!same_shape(img.pixels, img.labels)) {
    fail(Errc::ingestion,
         fmt::format("'{}' is {}x{} but its labels '{}' are {}x{}", rec.rgb_path.string(), img.pixels.width(),
                     img.pixels.height(), rec.label_path.string(), img.labels.width(), img.labels.height()));
  }
  img.plant_center = rec.plant_center;
  img.source_id = source_id_from_path(rec.rgb_path);
  img.subset = rec.subset;
  if (distinct_labels(img.labels).empty()) {
    std::clog << "warning: '" << rec.label_path.string() << "' contains no leaf labels\n";
  }
  return img;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io, fmt::format("cannot open '{}' for writing", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(Errc::io, fmt::format("cannot write '{}'", path.string()));
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvTable read_csv(const fs::path& path) {
  const std::string text = read_text_file(path);
  CsvTable table;
  std::istringstream lines(text);
  std::string line;
  bool first = true;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream cs(line);
    while (std::getline(cs, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (first) {
      table.header = std::move(cells);
      first = false;
      continue;
    }
    if (cells.size() != table.header.size()) {
      fail(Errc::ingestion, fmt::format("'{}': row has {} fields, header has {}", path.string(), cells.size(),
                                        table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (first) fail(Errc::ingestion, fmt::format("'{}' has no header row", path.string()));
  return table;
}

std::map<std::string, Pixel> read_centers_csv(const fs::path& path) {
  const CsvTable t = read_csv(path);
  if (t.header != std::vector<std::string>{"source_id", "x", "y"}) {
    fail(Errc::ingestion, fmt::format("'{}' must have header source_id,x,y", path.string()));
  }
  std::map<std::string, Pixel> centers;
  for (const auto& row : t.rows) {
    try {
      centers[row[0]] = {std::stoi(row[1]), std::stoi(row[2])};
    } catch (const std::logic_error&) {
      fail(Errc::ingestion, fmt::format("'{}': bad center for '{}'", path.string(), row[0]));
    }
  }
  return centers;
}

std::vector<SourceRecord> scan_source_dir(const fs::path& dir, SubsetTag subset) {
  if (!fs::is_directory(dir)) fail(Errc::ingestion, fmt::format("source directory '{}' not found", dir.string()));
  std::map<std::string, Pixel> centers;
  if (fs::exists(dir / "centers.csv")) centers = read_centers_csv(dir / "centers.csv");

  std::vector<fs::path> rgb_files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.ends_with("_rgb.png")) rgb_files.push_back(entry.path());
  }
  std::sort(rgb_files.begin(), rgb_files.end());

  std::vector<SourceRecord> records;
  for (const fs::path& rgb : rgb_files) {
    const std::string id = source_id_from_path(rgb);
    SourceRecord rec;
    rec.rgb_path = rgb;
    rec.label_path = dir / (id + "_label.png");
    if (!fs::exists(rec.label_path)) {
      fail(Errc::ingestion, fmt::format("'{}' has no matching label image '{}'", rgb.string(), rec.label_path.string()));
    }
    if (auto it = centers.find(id); it != centers.end()) rec.plant_center = it->second;
    rec.subset = subset;
    records.push_back(std::move(rec));
  }
  return records;
}

namespace {

RgbImage resize_rgb(const RgbImage& src, int w, int h) {
  RgbaImage rgba(src.width(), src.height());
  std::transform(src.pixels().begin(), src.pixels().end(), rgba.pixels().begin(),
                 [](const Rgb& p) { return Rgba{p.r, p.g, p.b, kAlphaOpaque}; });
  RgbaImage out(w, h);
  const double rx = static_cast<double>(w) / src.width();
  const double ry = static_cast<double>(h) / src.height();
  kernels::warp_render(rgba, AnchorWarp::make({0.0, 0.0}, {0.0, 0.0}, 0.0, rx, ry), out);
  RgbImage rgb(w, h);
  std::transform(out.pixels().begin(), out.pixels().end(), rgb.pixels().begin(),
                 [](const Rgba& p) { return p.rgb(); });
  return rgb;
}

RgbImage crop(const RgbImage& src, int x0, int y0, int w, int h) {
  RgbImage out(w, h);
  for (int y = 0; y < h; ++y) {
    const auto in = src.row(y + y0).subspan(static_cast<std::size_t>(x0), static_cast<std::size_t>(w));
    std::copy(in.begin(), in.end(), out.row(y).begin());
  }
  return out;
}

}  // namespace

std::vector<Background> prepare_backgrounds(const std::vector<Background>& sources,
                                            const BackgroundOptions& options) {
  if (options.width <= 0 || options.height <= 0) {
    fail(Errc::preparation, "prepare_backgrounds: target size must be positive");
  }
  std::vector<Background> out;
  out.reserve(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const Background& src = sources[i];
    RgbImage img = src.pixels;
    if (img.width() < options.width || img.height() < options.height) {
      if (!options.allow_resize) {
        fail(Errc::preparation, fmt::format("background '{}' is {}x{}, smaller than the {}x{} canvas", src.id,
                                            img.width(), img.height(), options.width, options.height));
      }
      const double f = std::max(static_cast<double>(options.width) / img.width(),
                                static_cast<double>(options.height) / img.height());
      img = resize_rgb(img, std::max(options.width, static_cast<int>(std::ceil(img.width() * f))),
                       std::max(options.height, static_cast<int>(std::ceil(img.height() * f))));
    }
    int x0 = (img.width() - options.width) / 2;
    int y0 = (img.height() - options.height) / 2;
    if (options.mode == CropMode::random) {
      CounterRng rng(options.seed, i);
      x0 = static_cast<int>(rng.uniform_int(0, img.width() - options.width));
      y0 = static_cast<int>(rng.uniform_int(0, img.height() - options.height));
    }
    out.push_back({src.id, crop(img, x0, y0, options.width, options.height)});
  }
  return out;
}

std::vector<Background> load_backgrounds(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(Errc::ingestion, fmt::format("background directory '{}' not found", dir.string()));
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Background> out;
  for (const auto& f : files) out.push_back({f.stem().string(), png::read_rgb(f)});
  return out;
}

void save_backgrounds(const std::vector<Background>& backgrounds, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(Errc::io, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  for (const Background& bg : backgrounds) png::write_rgb(dir / (bg.id + ".png"), bg.pixels);
}

std::string manifest_to_json(const SceneManifest& m) {
  json placements = json::array();
  for (const PlacementRecord& r : m.placements) {
    placements.push_back({{"leaf_id", r.placement.leaf_id},
                          {"x", r.placement.position.x},
                          {"y", r.placement.position.y},
                          {"angle_deg", r.placement.angle_deg},
                          {"scale_x", r.placement.scale_x},
                          {"scale_y", r.placement.scale_y},
                          {"z", r.placement.z},
                          {"visible_px", r.visible_px},
                          {"label", r.label}});
  }
  json doc = {{"image_id", m.image_id},
              {"kind", m.kind},
              {"global_seed", m.global_seed},
              {"image_index", m.image_index},
              {"background_id", m.background_id},
              {"plant_center", m.plant_center ? json{{"x", m.plant_center->x}, {"y", m.plant_center->y}} : json(nullptr)},
              {"placements", std::move(placements)},
              {"placed_count", m.placed_count},
              {"visible_count", m.visible_count}};
  return doc.dump(2) + "\n";
}

SceneManifest manifest_from_json(const std::string& text) {
  SceneManifest m;
  try {
    const json doc = json::parse(text);
    m.image_id = doc.at("image_id").get<std::string>();
    m.kind = doc.at("kind").get<std::string>();
    m.global_seed = doc.at("global_seed").get<std::uint64_t>();
    m.image_index = doc.at("image_index").get<std::uint64_t>();
    m.background_id = doc.at("background_id").get<std::string>();
    if (const auto& c = doc.at("plant_center"); !c.is_null()) {
      m.plant_center = Pixel{c.at("x").get<int>(), c.at("y").get<int>()};
    }
    for (const auto& p : doc.at("placements")) {
      PlacementRecord r;
      r.placement.leaf_id = p.at("leaf_id").get<std::string>();
      r.placement.position = {p.at("x").get<int>(), p.at("y").get<int>()};
      r.placement.angle_deg = p.at("angle_deg").get<double>();
      r.placement.scale_x = p.at("scale_x").get<double>();
      r.placement.scale_y = p.at("scale_y").get<double>();
      r.placement.z = p.at("z").get<int>();
      r.visible_px = p.at("visible_px").get<std::int64_t>();
      r.label = p.at("label").get<Label>();
      m.placements.push_back(std::move(r));
    }
    m.placed_count = doc.at("placed_count").get<int>();
    m.visible_count = doc.at("visible_count").get<int>();
  } catch (const json::exception& e) {
    fail(Errc::ingestion, fmt::format("malformed manifest: {}", e.what()));
  }
  return m;
}

SceneManifest read_manifest(const fs::path& path) {
  try {
    return manifest_from_json(read_text_file(path));
  } catch (const Error& e) {
    fail(e.code(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

SceneFiles scene_files(const fs::path& dir, const std::string& image_id) {
  return {dir / (image_id + "_rgb.png"), dir / (image_id + "_label.png"), dir / (image_id + "_fg.png"),
          dir / (image_id + "_manifest.json")};
}

SceneFiles write_scene(const Scene& scene, const SceneManifest& manifest, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(Errc::io, fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));
  const SceneFiles files = scene_files(out_dir, manifest.image_id);
  png::write_rgb(files.rgb, scene.pixels);
  png::write_labels16(files.label, scene.labels);
  Mask fg = foreground(scene.labels);
  for (auto& v : fg.pixels()) v = v ? 255 : 0;
  png::write_gray8(files.fg, fg);
  write_text_file(files.manifest, manifest_to_json(manifest));
  return files;
}

}  // namespace collage
