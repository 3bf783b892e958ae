#include <benchmark/benchmark.h>
#include <omp.h>

#include "collage/kernels.hpp"
#include "collage/rng.hpp"

using namespace collage;

namespace {

RgbaImage leaf_sprite(int w, int h) {
  RgbaImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double u = (x + 0.5 - w / 2.0) / (w / 2.0);
      const double v = (y + 0.5 - h / 2.0) / (h / 2.0);
      if (u * u + v * v <= 1.0) {
        img.at(x, y) = {static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y), 90, 255};
      }
    }
  }
  return img;
}

LabelImage noise_labels(int w, int h, int max_label, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  LabelImage img(w, h);
  for (int y = 0; y < h; ++y) {
    // Runs of one label so the table stays small, as in real masks.
    Label l = 0;
    for (int x = 0; x < w; ++x) {
      if (x % 16 == 0) l = static_cast<Label>(rng.uniform_int(0, static_cast<std::uint64_t>(max_label)));
      img.at(x, y) = l;
    }
  }
  return img;
}

template <bool Parallel>
void BM_warp_paste(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  const RgbaImage sprite = leaf_sprite(240, 600);
  RgbImage pixels(2048, 2048);
  LabelImage labels(2048, 2048, 0);
  const AnchorWarp warp = AnchorWarp::make({120.5, 599.5}, {1024.5, 1024.5}, 33.0, 1.0, 1.0);
  for (auto _ : state) {
    const auto n = Parallel ? kernels::warp_paste(sprite, warp, pixels, labels, 1)
                            : reference::warp_paste(sprite, warp, pixels, labels, 1);
    benchmark::DoNotOptimize(n);
  }
}

template <bool Parallel>
void BM_overlap(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  const LabelImage a = noise_labels(1024, 1024, 25, 1);
  const LabelImage b = noise_labels(1024, 1024, 25, 2);
  for (auto _ : state) {
    const OverlapTable t = Parallel ? kernels::overlap(a, b) : reference::overlap(a, b);
    benchmark::DoNotOptimize(t.counts.data());
  }
}

template <bool Parallel>
void BM_farthest_point(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  Mask m(2048, 2048, 0);
  for (int y = 400; y < 1600; ++y) {
    for (int x = 300 + y / 4; x < 900 + y / 3; ++x) m.at(x, y) = 1;
  }
  for (auto _ : state) {
    const auto p = Parallel ? kernels::farthest_point(m, {1024.5, 1024.5})
                            : reference::farthest_point(m, {1024.5, 1024.5});
    benchmark::DoNotOptimize(p);
  }
}

}  // namespace

BENCHMARK(BM_warp_paste<false>)->Name("warp_paste/serial")->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_warp_paste<true>)->Name("warp_paste/omp")->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_overlap<false>)->Name("overlap/serial")->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_overlap<true>)->Name("overlap/omp")->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_farthest_point<false>)->Name("farthest_point/serial")->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_farthest_point<true>)->Name("farthest_point/omp")->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
