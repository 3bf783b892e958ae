#pragma once

#include <array>
#include <cstdint>

namespace collage {

// Philox4x32-10 block function (Salmon et al., Random123). Exposed for
// known-answer testing.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

// Counter-based generator. Draw k of stream (seed, stream) is
//
//   philox4x32_10(counter = {k_lo, k_hi, stream_lo, stream_hi},
//                 key     = {seed_lo, seed_hi})
//
// with words 0 and 1 packed into a 64-bit value (word 1 high). Every value is
// a pure function of (seed, stream, k), so results never depend on thread
// scheduling, platform, or standard library. Distributions below are defined
// here rather than borrowed from <random>, whose algorithms are
// implementation-defined.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64() noexcept;

  // [0, 1) with 53 random bits.
  double uniform01() noexcept;
  // [lo, hi); returns lo when lo == hi.
  double uniform(double lo, double hi) noexcept;
  // Inclusive integer range [lo, hi], unbiased (Lemire's method).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept;

  std::uint64_t draws() const noexcept { return counter_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace collage
