#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "collage/leafbank.hpp"
#include "collage/rng.hpp"
#include "collage/synth.hpp"

namespace collage {

struct SourceRecord {
  std::filesystem::path rgb_path;
  std::filesystem::path label_path;
  std::optional<Pixel> plant_center;
  SubsetTag subset = SubsetTag::custom;
};

// Source id of "plant001_rgb.png" is "plant001".
std::string source_id_from_path(const std::filesystem::path& rgb_path);

AnnotatedImage load_annotated(const SourceRecord& rec);

// Plant-center sidecar: header "source_id,x,y".
std::map<std::string, Pixel> read_centers_csv(const std::filesystem::path& path);

// Pairs {stem}_rgb.png with {stem}_label.png in a directory (sorted by stem),
// attaching centers from centers.csv when present.
std::vector<SourceRecord> scan_source_dir(const std::filesystem::path& dir, SubsetTag subset);

enum class CropMode { center, random };

struct BackgroundOptions {
  int width = 0;
  int height = 0;
  CropMode mode = CropMode::center;
  // Upscale sources smaller than the canvas (bilinear) before cropping.
  bool allow_resize = false;
  std::uint64_t seed = 0;  // random crops only
};

std::vector<Background> prepare_backgrounds(const std::vector<Background>& sources,
                                            const BackgroundOptions& options);

std::vector<Background> load_backgrounds(const std::filesystem::path& dir);
void save_backgrounds(const std::vector<Background>& backgrounds, const std::filesystem::path& dir);

std::string manifest_to_json(const SceneManifest& manifest);
SceneManifest manifest_from_json(const std::string& text);
SceneManifest read_manifest(const std::filesystem::path& path);

struct SceneFiles {
  std::filesystem::path rgb, label, fg, manifest;
};

SceneFiles scene_files(const std::filesystem::path& dir, const std::string& image_id);

SceneFiles write_scene(const Scene& scene, const SceneManifest& manifest,
                       const std::filesystem::path& out_dir);

// Writes text with LF line endings, throwing Errc::io with the path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

// Minimal CSV for the fixed-header files this project writes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace collage
