#include <benchmark/benchmark.h>

#include <nlohmann/json.hpp>

#include "dem/dem.hpp"

namespace {

using nlohmann::json;

dem::ProcessSpec balls_spec(std::int64_t n) {
  return dem::spec_from_json(json{
      {"schema", 1},
      {"n", n},
      {"drift", {{"plugin", "balls-in-bins"}}},
      {"L", 1.0},
      {"delta", 0.0},
      {"beta", 1.0},
      {"lambda", 0.02},
      {"y_hat", {1.0}},
      {"domain", {{"t_lo", -0.2}, {"t_hi", 1.0}, {"lo", {0.05}}, {"hi", {1.2}}}},
      {"process", {{"plugin", "balls-in-bins"}}},
  });
}

void BM_SolveOde(benchmark::State& state) {
  const auto spec = balls_spec(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dem::solve_ode(spec));
}
BENCHMARK(BM_SolveOde)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_SimulateBallsInBins(benchmark::State& state) {
  const auto spec = balls_spec(state.range(0));
  const dem::BallsInBins plugin;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(dem::simulate(plugin, spec, ++seed));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateBallsInBins)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_BinomialTail(benchmark::State& state) {
  const std::int64_t m = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(dem::binomial_tail(m, 1e-3, 5));
}
BENCHMARK(BM_BinomialTail)->Arg(1000)->Arg(1000000)->Arg(100000000);

}  // namespace

BENCHMARK_MAIN();
