#pragma once

#include <vector>

#include "collage/kernels.hpp"

namespace collage::detail {

// Maps raw label values to dense table slots (0 = background).
class OverlapIndex {
 public:
  OverlapIndex(const LabelImage& a, const LabelImage& b)
      : a_labels_(distinct_labels(a)), b_labels_(distinct_labels(b)),
        a_slot_(slots(a_labels_)), b_slot_(slots(b_labels_)) {}

  std::size_t a_slot(Label v) const noexcept { return a_slot_[v]; }
  std::size_t b_slot(Label v) const noexcept { return b_slot_[v]; }

  OverlapTable empty_table() const {
    OverlapTable t;
    t.a_labels = a_labels_;
    t.b_labels = b_labels_;
    t.counts.assign((a_labels_.size() + 1) * (b_labels_.size() + 1), 0);
    return t;
  }

 private:
  static std::vector<std::uint32_t> slots(const std::vector<Label>& labels) {
    std::vector<std::uint32_t> s(labels.empty() ? 1 : labels.back() + 1u, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) s[labels[i]] = static_cast<std::uint32_t>(i + 1);
    return s;
  }

  std::vector<Label> a_labels_;
  std::vector<Label> b_labels_;
  std::vector<std::uint32_t> a_slot_;
  std::vector<std::uint32_t> b_slot_;
};

}  // namespace collage::detail
