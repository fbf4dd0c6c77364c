#include <benchmark/benchmark.h>

#include "pt/rng.hpp"
#include "pt/shape.hpp"

namespace {

pt::LandmarkState grid_state(int count, std::uint64_t seed) {
  pt::Rng rng(seed);
  pt::LandmarkState state;
  state.points.resize(count, 2);
  state.momenta.resize(count, 2);
  for (int i = 0; i < count; ++i) {
    state.points(i, 0) = 1.3 * (i % 10) + 0.3 * rng.uniform(-1.0, 1.0);
    state.points(i, 1) = 1.3 * (i / 10) + 0.3 * rng.uniform(-1.0, 1.0);
    state.momenta(i, 0) = rng.uniform(-0.5, 0.5);
    state.momenta(i, 1) = rng.uniform(-0.5, 0.5);
  }
  return state;
}

void BM_GeodesicShoot(benchmark::State& state) {
  const pt::Kernel kernel{pt::KernelFamily::kGaussian, 1.0};
  const auto initial = grid_state(static_cast<int>(state.range(0)), 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(pt::geodesic_shoot(initial, kernel, 1.0, 1e-2));
}
BENCHMARK(BM_GeodesicShoot)->Arg(10)->Arg(50);

void BM_GramMatrix(benchmark::State& state) {
  const pt::Kernel kernel{pt::KernelFamily::kGaussian, 1.0};
  const auto initial = grid_state(50, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(pt::gram_matrix(initial.points, kernel));
}
BENCHMARK(BM_GramMatrix);

void BM_RandomWalkStep(benchmark::State& state) {
  const pt::Kernel kernel{pt::KernelFamily::kGaussian, 0.4};
  const pt::ShapeCurve circle = pt::circle_curve(40, 1.0);
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        pt::shape_random_walk(circle, kernel, 1, 0.03, {1.0, 0.0}, seed++));
}
BENCHMARK(BM_RandomWalkStep);

}  // namespace

BENCHMARK_MAIN();
