#include <benchmark/benchmark.h>

#include "pt/diffusion.hpp"
#include "pt/fft.hpp"
#include "pt/gibbs.hpp"
#include "pt/image.hpp"
#include "pt/image_stats.hpp"
#include "pt/rng.hpp"
#include "pt/synthesis.hpp"

namespace {

pt::ImageGrid noise_image(int size, std::uint64_t seed) {
  pt::Rng rng(seed);
  pt::ImageGrid img(size, size);
  for (double& v : img.samples()) v = rng.normal();
  return img;
}

void BM_GibbsSweep(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  pt::IsingGrid grid = pt::IsingGrid::square(side, noise_image(side, 1), 1.0, 1.0, 2.0);
  pt::Rng rng(2);
  pt::randomize_spins(grid, rng);
  for (auto _ : state) pt::gibbs_sweep(grid, rng);
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_GibbsSweep)->Arg(64)->Arg(256);

void BM_Fft2d(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const pt::ImageGrid img = noise_image(size, 3);
  for (auto _ : state) benchmark::DoNotOptimize(pt::fft_2d(img));
}
BENCHMARK(BM_Fft2d)->Arg(256)->Arg(1024);

void BM_SpectrumSlope(benchmark::State& state) {
  const pt::ImageGrid img = noise_image(256, 4);
  for (auto _ : state) benchmark::DoNotOptimize(pt::power_spectrum_slope(img));
}
BENCHMARK(BM_SpectrumSlope);

void BM_DeadLeaves(benchmark::State& state) {
  const pt::DeadLeavesSpec spec;
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(pt::synth_dead_leaves(spec, static_cast<int>(state.range(0)), seed++));
}
BENCHMARK(BM_DeadLeaves)->Arg(128)->Arg(256);

void BM_DiffuseStep(benchmark::State& state) {
  const pt::ImageGrid img = noise_image(128, 5);
  for (auto _ : state)
    benchmark::DoNotOptimize(pt::diffuse(img, 0.2, 10, 0.02, 0.1));
  state.SetItemsProcessed(state.iterations() * 10 * 128 * 128);
}
BENCHMARK(BM_DiffuseStep);

}  // namespace

BENCHMARK_MAIN();
