#include <benchmark/benchmark.h>

#include <omp.h>

#include "brint/capacity.hpp"
#include "brint/interlacement.hpp"
#include "brint/percolation.hpp"
#include "brint/sausage_graph.hpp"
#include "brint/shape.hpp"

using namespace brint;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& st) {
  st.SetLabel(st.range(0) ? "openmp x" + std::to_string(omp_get_max_threads()) : "serial");
}

// Fixed sample shared by raster and graph benchmarks.
const WindowSample& window_sample() {
  static const WindowSample s = [] {
    WindowConfig cfg;
    cfg.window = BoxRegion(Point(3), 4.0, NormTag::linf);
    cfg.r = 1.0;
    cfg.alpha_max = 0.8;
    cfg.sim.step_h = 1.0 / 3.0;
    cfg.sim.n_walkers = 20'000;
    WindowSampler sampler(cfg, RngSpec{7, 0, 1});
    return sampler.sample(RngSpec{7, 1, 0});
  }();
  return s;
}

void BM_capacity_wos(benchmark::State& st) {
  auto K = make_region_shape(BoxRegion(Point(3), 1.0, NormTag::linf));
  SimParams sim;
  sim.n_walkers = 20'000;
  for (auto _ : st) {
    auto est = estimate_capacity_mc(*K, sim, RngSpec{3, 0, 0}, exec_of(st));
    benchmark::DoNotOptimize(est.value);
  }
  label(st);
}

void BM_voxel_potentials(benchmark::State& st) {
  auto K = make_region_shape(BoxRegion(Point(3), 1.0, NormTag::euclidean));
  const VoxelSet v = voxelize(*K, 0.1);
  for (auto _ : st) {
    auto pot = voxel_potentials(v, exec_of(st));
    benchmark::DoNotOptimize(pot.data());
  }
  label(st);
}

void BM_rasterize(benchmark::State& st) {
  const WindowSample& s = window_sample();
  for (auto _ : st) {
    auto g = rasterize(s, 0.8, s.window, 0.5, exec_of(st));
    benchmark::DoNotOptimize(g.occupied_fraction(0.8));
  }
  label(st);
}

void BM_build_graph(benchmark::State& st) {
  const WindowSample& s = window_sample();
  for (auto _ : st) {
    auto g = build_graph(s, 0.8, exec_of(st));
    benchmark::DoNotOptimize(&g);
  }
  label(st);
}

}  // namespace

BENCHMARK(BM_capacity_wos)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_voxel_potentials)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rasterize)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_build_graph)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
