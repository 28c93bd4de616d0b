#include <benchmark/benchmark.h>

#include "satopt/bessel.hpp"
#include "satopt/channel.hpp"
#include "satopt/problem.hpp"
#include "satopt/sca.hpp"
#include "satopt/subproblem.hpp"

namespace {

using namespace satopt;

void BM_BesselJ1(benchmark::State& state) {
  double u = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_j(1, u));
    u = u > 40.0 ? 0.0 : u + 0.0137;
  }
}
BENCHMARK(BM_BesselJ1);

void BM_BuildChannel(benchmark::State& state) {
  const SystemConfig cfg;
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(build_channel(cfg, sample_scene(cfg, seed++)));
}
BENCHMARK(BM_BuildChannel);

void BM_SolveSubproblem(benchmark::State& state) {
  SystemConfig cfg;
  cfg.weight_w_bps_per_watt = static_cast<double>(state.range(0));
  const ChannelMatrix g = build_channel(cfg, sample_scene(cfg, 4));
  const TrafficDemand d = demand_from_slope(0.7e9, cfg.n_beams);
  const LogPower y_bar = to_log_power(upa(cfg), cfg.p_floor_w);
  for (auto _ : state) benchmark::DoNotOptimize(solve_subproblem(g, cfg, d, y_bar));
}
BENCHMARK(BM_SolveSubproblem)->Arg(0)->Arg(10000000)->Unit(benchmark::kMicrosecond);

void BM_RunSca(benchmark::State& state) {
  SystemConfig cfg;
  cfg.weight_w_bps_per_watt = static_cast<double>(state.range(0));
  const ChannelMatrix g = build_channel(cfg, sample_scene(cfg, 4));
  const TrafficDemand d = demand_from_slope(0.7e9, cfg.n_beams);
  ScaOptions opt;
  opt.keep_iterates = false;
  for (auto _ : state) benchmark::DoNotOptimize(run_sca(g, cfg, d, upa(cfg), opt));
}
BENCHMARK(BM_RunSca)->Arg(0)->Arg(10000000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
