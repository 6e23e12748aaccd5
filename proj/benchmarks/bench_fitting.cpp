#include <benchmark/benchmark.h>

#include "care/fitting.hpp"
#include "care/synth.hpp"

using namespace care;

namespace {

CorrespondenceSet contaminated(int n, double outliers, synth::TransformKind kind) {
  synth::SynthConfig cfg;
  cfg.seed = 17;
  cfg.n_points = n;
  cfg.outlier_fraction = outliers;
  cfg.noise_sigma = 1.0;
  cfg.transform_kind = kind;
  return synth::make_correspondences(cfg, synth::plant_transform(cfg)).pairs;
}

void BM_FitPolynomial(benchmark::State& state) {
  const auto data = contaminated(static_cast<int>(state.range(0)), 0.0, synth::TransformKind::quadratic);
  const int degree = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(fitting::fit_polynomial(data, degree));
}
BENCHMARK(BM_FitPolynomial)->Args({20, 2})->Args({200, 2})->Args({200, 5});

void BM_Dlt(benchmark::State& state) {
  const auto data = contaminated(static_cast<int>(state.range(0)), 0.0, synth::TransformKind::homography);
  for (auto _ : state) benchmark::DoNotOptimize(fitting::fit_homography_dlt(data));
}
BENCHMARK(BM_Dlt)->Arg(8)->Arg(100);

void BM_Ransac(benchmark::State& state) {
  const auto data = contaminated(100, state.range(0) / 100.0, synth::TransformKind::homography);
  for (auto _ : state) benchmark::DoNotOptimize(fitting::ransac_homography(data, {3.0, 2000, 0.999, 1}));
}
BENCHMARK(BM_Ransac)->Arg(10)->Arg(30)->Arg(50);

void BM_RanPoly(benchmark::State& state) {
  const auto data = contaminated(50, 0.2, synth::TransformKind::quadratic);
  for (auto _ : state) benchmark::DoNotOptimize(fitting::fit_ran_poly(data, {}, 2));
}
BENCHMARK(BM_RanPoly);

}  // namespace
