#include "collage/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "collage/error.hpp"

namespace collage::png {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    fail(mode[0] == 'r' ? Errc::ingestion : Errc::io,
         "cannot open '" + path.string() + "' for " + (mode[0] == 'r' ? "reading" : "writing"));
  }
  return f;
}

void on_png_error(png_structp png, png_const_charp msg) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  if (text) *text = msg;
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

enum class Want { rgb, rgba, labels };

// Decoded samples: 1 channel (labels, 16-bit capable) or 3/4 channels of 8 bits.
struct Decoded {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint16_t> samples;
};

Decoded decode(const std::filesystem::path& path, Want want) {
  FilePtr file = open_file(path, "rb");
  std::string error;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, on_png_error, on_png_warning);
  if (!png) fail(Errc::ingestion, "libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(Errc::ingestion, "libpng initialisation failed");
  }

  Decoded out;
  std::vector<png_bytep> rows;
  std::vector<png_byte> buffer;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(Errc::ingestion, "cannot decode '" + path.string() + "': " + error);
  }

  png_init_io(png, file.get());
  png_read_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);

  bool wide = false;
  if (want == Want::labels) {
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
      if (bit_depth < 8) png_set_packing(png);  // indices stay raw
    } else if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
      if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
      if (color_type == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_strip_alpha(png);
      if (bit_depth == 16) {
        png_set_swap(png);  // samples arrive as little-endian byte pairs
        wide = true;
      }
    } else {
      png_destroy_read_struct(&png, &info, nullptr);
      fail(Errc::ingestion, "'" + path.string() + "' is a colour image, expected single-channel labels");
    }
    out.channels = 1;
  } else {
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    if (want == Want::rgb) {
      if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
      out.channels = 3;
    } else {
      if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
      png_set_filler(png, 0xFF, PNG_FILLER_AFTER);
      out.channels = 4;
    }
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = buffer.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  out.width = static_cast<int>(width);
  out.height = static_cast<int>(height);
  const std::size_t count = static_cast<std::size_t>(width) * height * out.channels;
  out.samples.resize(count);
  for (png_uint_32 y = 0; y < height; ++y) {
    const png_byte* row = rows[y];
    for (std::size_t i = 0; i < static_cast<std::size_t>(width) * out.channels; ++i) {
      std::uint16_t v;
      if (wide) {
        v = static_cast<std::uint16_t>(row[2 * i] | (row[2 * i + 1] << 8));
      } else {
        v = row[i];
      }
      out.samples[static_cast<std::size_t>(y) * width * out.channels + i] = v;
    }
  }
  return out;
}

void encode(const std::filesystem::path& path, int width, int height, int color_type, int bit_depth,
            const std::vector<png_byte>& data) {
  FilePtr file = open_file(path, "wb");
  std::string error;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, on_png_error, on_png_warning);
  if (!png) fail(Errc::io, "libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(Errc::io, "libpng initialisation failed");
  }
  std::vector<png_const_bytep> rows(static_cast<std::size_t>(height));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(Errc::io, "cannot encode '" + path.string() + "': " + error);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  const std::size_t rowbytes = data.size() / static_cast<std::size_t>(std::max(height, 1));
  for (int y = 0; y < height; ++y) rows[y] = data.data() + static_cast<std::size_t>(y) * rowbytes;
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) fail(Errc::io, "cannot write '" + path.string() + "'");
}

void require_nonempty(const std::filesystem::path& path, int w, int h) {
  if (w <= 0 || h <= 0) fail(Errc::io, "refusing to write empty image '" + path.string() + "'");
}

}  // namespace

RgbImage read_rgb(const std::filesystem::path& path) {
  const Decoded d = decode(path, Want::rgb);
  RgbImage img(d.width, d.height);
  auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = {static_cast<std::uint8_t>(d.samples[3 * i]), static_cast<std::uint8_t>(d.samples[3 * i + 1]),
             static_cast<std::uint8_t>(d.samples[3 * i + 2])};
  }
  return img;
}

RgbaImage read_rgba(const std::filesystem::path& path) {
  const Decoded d = decode(path, Want::rgba);
  RgbaImage img(d.width, d.height);
  auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = {static_cast<std::uint8_t>(d.samples[4 * i]), static_cast<std::uint8_t>(d.samples[4 * i + 1]),
             static_cast<std::uint8_t>(d.samples[4 * i + 2]), static_cast<std::uint8_t>(d.samples[4 * i + 3])};
  }
  return img;
}

LabelImage read_labels(const std::filesystem::path& path) {
  const Decoded d = decode(path, Want::labels);
  LabelImage img(d.width, d.height);
  std::copy(d.samples.begin(), d.samples.end(), img.pixels().begin());
  return img;
}

void write_rgb(const std::filesystem::path& path, const RgbImage& img) {
  require_nonempty(path, img.width(), img.height());
  std::vector<png_byte> data;
  data.reserve(img.size() * 3);
  for (const Rgb& p : img.pixels()) data.insert(data.end(), {p.r, p.g, p.b});
  encode(path, img.width(), img.height(), PNG_COLOR_TYPE_RGB, 8, data);
}

void write_rgba(const std::filesystem::path& path, const RgbaImage& img) {
  require_nonempty(path, img.width(), img.height());
  std::vector<png_byte> data;
  data.reserve(img.size() * 4);
  for (const Rgba& p : img.pixels()) data.insert(data.end(), {p.r, p.g, p.b, p.a});
  encode(path, img.width(), img.height(), PNG_COLOR_TYPE_RGBA, 8, data);
}

void write_labels16(const std::filesystem::path& path, const LabelImage& labels) {
  require_nonempty(path, labels.width(), labels.height());
  std::vector<png_byte> data;
  data.reserve(labels.size() * 2);
  for (Label v : labels.pixels()) {
    data.push_back(static_cast<png_byte>(v >> 8));  // PNG is big-endian
    data.push_back(static_cast<png_byte>(v & 0xFF));
  }
  encode(path, labels.width(), labels.height(), PNG_COLOR_TYPE_GRAY, 16, data);
}

void write_gray8(const std::filesystem::path& path, const Mask& mask) {
  require_nonempty(path, mask.width(), mask.height());
  std::vector<png_byte> data(mask.pixels().begin(), mask.pixels().end());
  encode(path, mask.width(), mask.height(), PNG_COLOR_TYPE_GRAY, 8, data);
}

}  // namespace collage::png
