#include <benchmark/benchmark.h>

#include "cpnp/gauss_newton.hpp"
#include "cpnp/linear_system.hpp"
#include "cpnp/solver.hpp"
#include "cpnp/synthetic.hpp"
#include "cpnp/variance.hpp"

namespace {

cpnp::Scene make_scene(int n, double sigma) {
  cpnp::ScenarioConfig cfg;
  cfg.n_points = n;
  cfg.sigma_pixels = sigma;
  cfg.seed = 0x5eed;
  return cpnp::generate_scene(cfg);
}

void BM_BuildNormalEquations(benchmark::State& state) {
  const auto scene = make_scene(static_cast<int>(state.range(0)), 2.0);
  const cpnp::CameraIntrinsics intr = cpnp::ScenarioConfig{}.intrinsics();
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpnp::build_normal_equations(scene.data, intr));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildNormalEquations)->RangeMultiplier(4)->Range(64, 65536)
    ->Complexity(benchmark::oN);

void BM_EstimateNoiseVariance(benchmark::State& state) {
  const auto scene = make_scene(static_cast<int>(state.range(0)), 2.0);
  const cpnp::CameraIntrinsics intr = cpnp::ScenarioConfig{}.intrinsics();
  const auto ne = cpnp::build_normal_equations(scene.data, intr);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpnp::estimate_noise_variance(ne));
  }
}
BENCHMARK(BM_EstimateNoiseVariance)->Arg(1000)->Arg(10000);

void BM_CpnpSolve(benchmark::State& state) {
  const auto scene = make_scene(static_cast<int>(state.range(0)), 2.0);
  const cpnp::CameraIntrinsics intr = cpnp::ScenarioConfig{}.intrinsics();
  cpnp::SolverOptions opts;
  opts.refine_gn = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpnp::cpnp_solve(scene.data, intr, opts));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CpnpSolve)->RangeMultiplier(4)->Range(256, 65536)
    ->Complexity(benchmark::oN);

void BM_CpnpSolveWithGn(benchmark::State& state) {
  const auto scene = make_scene(static_cast<int>(state.range(0)), 2.0);
  const cpnp::CameraIntrinsics intr = cpnp::ScenarioConfig{}.intrinsics();
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpnp::cpnp_solve(scene.data, intr, {}));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CpnpSolveWithGn)->RangeMultiplier(4)->Range(256, 65536)
    ->Complexity(benchmark::oN);

void BM_GnRefine(benchmark::State& state) {
  const auto scene = make_scene(static_cast<int>(state.range(0)), 2.0);
  const cpnp::CameraIntrinsics intr = cpnp::ScenarioConfig{}.intrinsics();
  cpnp::SolverOptions opts;
  opts.refine_gn = false;
  const auto report = cpnp::cpnp_solve(scene.data, intr, opts);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cpnp::gn_refine(report.pose_be, intr, scene.data, {}));
  }
}
BENCHMARK(BM_GnRefine)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
