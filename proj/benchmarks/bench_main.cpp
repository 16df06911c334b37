#include <benchmark/benchmark.h>

#include <vector>

#include "vppfreq/allocator.hpp"
#include "vppfreq/freq_model.hpp"
#include "vppfreq/ode_oracle.hpp"
#include "vppfreq/requirements.hpp"

using namespace vppfreq;

namespace {

GridParams grid() {
  GridParams g;
  g.d0 = 2.0;
  g.h0 = 10.0;
  g.r = 25.0;
  g.t_sg = 5.0;
  g.f_db1 = 0.03;
  g.f_db2 = 0.033;
  return g;
}

SecurityLimits limits() {
  SecurityLimits l;
  l.rocof_lim = 0.4;
  l.nadir_lim = 0.5;
  l.qss_lim = 0.35;
  return l;
}

std::vector<IbrSpec> ibrs() {
  const double alpha[] = {3, 4, 1, 1, 2, 1, 1, 1};
  const double beta[] = {2, 3, 1, 1, 1.5, 1, 1, 1};
  const double rated[] = {0.13, 0.1, 0.04, 0.05, 0.05, 0.1, 0.02, 0.01};
  std::vector<IbrSpec> out(8);
  for (int k = 0; k < 8; ++k) {
    out[k].alpha = alpha[k];
    out[k].beta = beta[k];
    out[k].p_rated = rated[k];
    out[k].h_min = 0.1;
    out[k].d_min = 0.1;
  }
  return out;
}

const Disturbance kDist{0.25};
const VppParams kVpp{19.125, 12.109};

void BM_Metrics(benchmark::State& state) {
  const auto g = grid();
  for (auto _ : state) benchmark::DoNotOptimize(metrics(g, kVpp, kDist));
}
BENCHMARK(BM_Metrics);

void BM_ResponseSample(benchmark::State& state) {
  const FrequencyResponse resp(grid(), kVpp, kDist);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(resp.at(t));
    t = t > 30.0 ? 0.0 : t + 0.01;
  }
}
BENCHMARK(BM_ResponseSample);

void BM_Simulate(benchmark::State& state) {
  SimConfig cfg;
  cfg.t_end = static_cast<double>(state.range(0));
  const auto g = grid();
  for (auto _ : state) benchmark::DoNotOptimize(simulate(g, kVpp, kDist, cfg));
}
BENCHMARK(BM_Simulate)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_DetermineRequirement(benchmark::State& state) {
  const auto g = grid();
  const auto l = limits();
  for (auto _ : state) benchmark::DoNotOptimize(determine_requirement(g, kDist, l));
}
BENCHMARK(BM_DetermineRequirement)->Unit(benchmark::kMicrosecond);

void BM_SolveScalarized(benchmark::State& state) {
  const AllocationProblem pb(ibrs(), 19.125, 12.109375, 0.25);
  const auto w = sample_simplex(pb.objective_count(), 1, 1).front();
  for (auto _ : state) benchmark::DoNotOptimize(solve_scalarized(pb, w));
}
BENCHMARK(BM_SolveScalarized);

void BM_ParetoFront(benchmark::State& state) {
  const AllocationProblem pb(ibrs(), 19.125, 12.109375, 0.25);
  const auto threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        pareto_front(pb, static_cast<std::size_t>(state.range(0)), 42, threads));
  }
}
BENCHMARK(BM_ParetoFront)->Args({200, 1})->Args({2000, 1})->Args({2000, 4})
    ->Unit(benchmark::kMillisecond);

void BM_CompareSingleObjective(benchmark::State& state) {
  const AllocationProblem pb(ibrs(), 19.125, 12.109375, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(compare_single_objective(pb, 200, 42, 1));
}
BENCHMARK(BM_CompareSingleObjective)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
