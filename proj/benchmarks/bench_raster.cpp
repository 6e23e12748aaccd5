#include <benchmark/benchmark.h>

#include <random>

#include "care/raster.hpp"
#include "care/vessel.hpp"
#include "care/warp.hpp"

using namespace care;

namespace {

raster::ImageGrid noise(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution on(0.5);
  std::vector<double> v(static_cast<std::size_t>(n) * n);
  for (auto& x : v) x = on(rng) ? 1.0 : 0.0;
  return raster::ImageGrid(n, n, std::move(v));
}

void BM_Opening(benchmark::State& state) {
  const auto img = noise(static_cast<int>(state.range(0)), 1);
  const raster::StructuringElement se{static_cast<int>(state.range(1)), raster::ElementShape::square};
  for (auto _ : state) benchmark::DoNotOptimize(raster::opening(img, se));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_Opening)->Args({256, 1})->Args({1000, 1})->Args({1000, 3});

void BM_Skeletonize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
  for (int y = n / 4; y < 3 * n / 4; ++y)
    for (int x = n / 4; x < 3 * n / 4; ++x) v[static_cast<std::size_t>(y) * n + x] = ((x / 8 + y / 8) % 3 != 0);
  const raster::ImageGrid img(n, n, v);
  for (auto _ : state) benchmark::DoNotOptimize(vessel::skeletonize(img));
}
BENCHMARK(BM_Skeletonize)->Arg(256)->Arg(512);

void BM_Vesselness(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  const int n = static_cast<int>(state.range(0));
  std::vector<double> v(static_cast<std::size_t>(n) * n);
  for (auto& x : v) x = u(rng);
  const raster::ImageGrid img(n, n, v);
  for (auto _ : state) benchmark::DoNotOptimize(vessel::enhance_vesselness(img));
}
BENCHMARK(BM_Vesselness)->Arg(256);

void BM_Warp(benchmark::State& state) {
  const auto img = noise(1000, 3);
  const fitting::Transform t{fitting::Homography{{0.99, 0.02, 4, -0.02, 1.01, -3, 1e-6, 0, 1}}, {0, 0}};
  for (auto _ : state) benchmark::DoNotOptimize(warp::warp(img, t, 1000, 1000));
}
BENCHMARK(BM_Warp);

}  // namespace
