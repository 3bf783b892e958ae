#pragma once

#include <filesystem>

#include "collage/image.hpp"

namespace collage::png {

// Any PNG colour type is converted to 8-bit RGB (16-bit samples are reduced).
RgbImage read_rgb(const std::filesystem::path& path);
RgbaImage read_rgba(const std::filesystem::path& path);

// Instance labels: 8- or 16-bit grayscale, or palette images whose indices are
// the labels. Values are taken verbatim, never gamma- or palette-mapped.
LabelImage read_labels(const std::filesystem::path& path);

void write_rgb(const std::filesystem::path& path, const RgbImage& img);
void write_rgba(const std::filesystem::path& path, const RgbaImage& img);
void write_labels16(const std::filesystem::path& path, const LabelImage& labels);
void write_gray8(const std::filesystem::path& path, const Mask& mask);

}  // namespace collage::png
