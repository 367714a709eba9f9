// Serial reference kernel vs the OpenMP kernel on a small Moon-component grid.

#include <benchmark/benchmark.h>

#include "trichord/chords.hpp"

using namespace trichord;

namespace {

struct Setup {
  SystemParams params{kEarthMoonMu};
  FindConfig config;
  std::vector<Seed> seeds;

  Setup() {
    const double h = lagrange_points(params).energies[0] - 1e-3;
    const auto b = component_bounds(HillLabel::moon_component, h, params);
    config.grid = {{GridRange{b.q1_min, b.q1_max}, GridRange{-b.q3_max, b.q3_max}}, 10, HillLabel::moon_component};
    config.t_max = 5.0;
    seeds = seed_grid(params, h, ChordTarget::xz_plane, config.grid).seeds;
  }
};

const Setup& setup() {
  static const Setup s;
  return s;
}

void BM_serial(benchmark::State& state) {
  const auto& s = setup();
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::process_seeds_serial(s.seeds, ChordTarget::xz_plane, s.params, s.config));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(s.seeds.size()));
}

void BM_parallel(benchmark::State& state) {
  const auto& s = setup();
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        kernels::process_seeds_parallel(s.seeds, ChordTarget::xz_plane, s.params, s.config, workers));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(s.seeds.size()));
}

}  // namespace

BENCHMARK(BM_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
