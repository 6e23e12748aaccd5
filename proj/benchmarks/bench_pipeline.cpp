#include <benchmark/benchmark.h>

#include "care/pipeline.hpp"
#include "care/synth.hpp"

using namespace care;

namespace {

void BM_RegisterPair(benchmark::State& state) {
  synth::SynthConfig cfg;
  cfg.seed = 5;
  cfg.source_fov = 0.5;
  const auto p = synth::make_problem(cfg);
  const vessel::VesselMap source{p.source_img, vessel::Modality::octa};
  const vessel::VesselMap target{p.target_img, vessel::Modality::wfcfp};
  const io::RoiPair rois{*p.macula, *p.optic_disc};
  const pipeline::PipelineConfig pc;
  for (auto _ : state) benchmark::DoNotOptimize(pipeline::register_pair(source, target, rois, pc));
}
BENCHMARK(BM_RegisterPair)->Unit(benchmark::kMillisecond);

void BM_MakeProblem(benchmark::State& state) {
  synth::SynthConfig cfg;
  cfg.source_fov = 0.5;
  for (auto _ : state) {
    ++cfg.seed;
    benchmark::DoNotOptimize(synth::make_problem(cfg));
  }
}
BENCHMARK(BM_MakeProblem)->Unit(benchmark::kMillisecond);

}  // namespace
