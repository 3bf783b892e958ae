#include "collage/image.hpp"

#include <algorithm>

#include "collage/error.hpp"

namespace collage {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_input: return "invalid input";
    case Errc::empty_extraction: return "empty extraction";
    case Errc::degenerate_mask: return "degenerate mask";
    case Errc::degenerate_scale: return "degenerate scale";
    case Errc::invalid_placement: return "invalid placement";
    case Errc::contract_violation: return "contract violation";
    case Errc::configuration: return "configuration error";
    case Errc::io: return "I/O error";
    case Errc::ingestion: return "ingestion error";
    case Errc::preparation: return "preparation error";
    case Errc::evaluation: return "evaluation error";
  }
  return "unknown error";
}

Mask alpha_mask(const RgbaImage& img) {
  Mask out(img.width(), img.height());
  std::transform(img.pixels().begin(), img.pixels().end(), out.pixels().begin(),
                 [](const Rgba& p) { return static_cast<std::uint8_t>(is_opaque(p) ? 1 : 0); });
  return out;
}

Mask foreground(const LabelImage& labels) {
  Mask out(labels.width(), labels.height());
  std::transform(labels.pixels().begin(), labels.pixels().end(), out.pixels().begin(),
                 [](Label l) { return static_cast<std::uint8_t>(l != 0 ? 1 : 0); });
  return out;
}

std::size_t count_on(const Mask& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.pixels().begin(), mask.pixels().end(), [](std::uint8_t v) { return v != 0; }));
}

}  // namespace collage
