#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "collage/image.hpp"

namespace collage::cli {

// Runs one command line (args[0] is the program name). Summaries go to `out`,
// diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Pixels with a 4-neighbour carrying a different label.
Mask label_transitions(const LabelImage& labels);

// Transition pixels blended 1:3 with the boundary tint; everything else is
// copied from `rgb`.
RgbImage render_overlay(const RgbImage& rgb, const LabelImage& labels);

inline constexpr Rgb kBoundaryTint{255, 0, 255};

}  // namespace collage::cli
