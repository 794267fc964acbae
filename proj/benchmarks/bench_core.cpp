#include <benchmark/benchmark.h>

#include <vector>

#include "mrm/bayes.hpp"
#include "mrm/lattice.hpp"
#include "mrm/planning.hpp"
#include "mrm/rng.hpp"

namespace {

using namespace mrm;

void BM_KeyedUniform(benchmark::State& state) {
  const KeyedUniform u(1, 2);
  std::uint32_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(u.at(i++, 7));
}
BENCHMARK(BM_KeyedUniform);

void BM_QuantileBatch(benchmark::State& state) {
  const auto dist = RewardDistribution::pareto(1.0, 1.5);
  std::vector<double> row(static_cast<std::size_t>(state.range(0)));
  SeededRng rng(1, 0);
  for (auto _ : state) {
    for (double& x : row) x = rng.uniform();
    dist.quantile_in_place(row);
    benchmark::DoNotOptimize(row.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_QuantileBatch)->Arg(1024);

void BM_LatticeTotals(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  std::uint64_t stream = 0;
  for (auto _ : state) {
    const LazyLatticeRewards field(RewardDistribution::exponential(1.0), 3, stream++);
    benchmark::DoNotOptimize(optimal_totals_at(field, {n}));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LatticeTotals)->RangeMultiplier(2)->Range(128, 2048)->Complexity(benchmark::oNSquared);

void BM_IterativePlan(benchmark::State& state) {
  const auto field = LatticeField::generate(RewardDistribution::exponential(1.0), 1023, 5);
  const auto m = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(iterative_plan(field, m, 1024));
}
BENCHMARK(BM_IterativePlan)->Arg(8)->Arg(64);

void chain_bench(benchmark::State& state, ChainSolver solver) {
  const double length = static_cast<double>(state.range(0));
  const auto field = MarkedPointField::generate(1.0, reachable_cone(length, 1.0),
                                                RewardDistribution::exponential(1.0), 9);
  for (auto _ : state) benchmark::DoNotOptimize(optimal_plan(field, {}, length, 1.0, solver));
  state.counters["targets"] = static_cast<double>(field.size());
}
void BM_PairScan(benchmark::State& state) { chain_bench(state, ChainSolver::PairScan); }
void BM_DominanceSweep(benchmark::State& state) { chain_bench(state, ChainSolver::DominanceSweep); }
BENCHMARK(BM_PairScan)->Arg(25)->Arg(50)->Arg(100);
BENCHMARK(BM_DominanceSweep)->Arg(25)->Arg(50)->Arg(100)->Arg(400);

void BM_RecedingHorizon(benchmark::State& state) {
  const double s = static_cast<double>(state.range(0));
  std::uint64_t stream = 0;
  for (auto _ : state) {
    const StripwiseField field(1.0, RewardDistribution::bernoulli(0.5), 4, stream++, s, s);
    benchmark::DoNotOptimize(receding_horizon_plan(field, {}, 256.0, s, 1.0));
  }
}
BENCHMARK(BM_RecedingHorizon)->Arg(4)->Arg(16);

void BM_BeliefUpdate(benchmark::State& state) {
  GaussianBelief b{};
  double y = 0.0;
  for (auto _ : state) {
    b = update(b, {y += 0.1, 1.0});
    benchmark::DoNotOptimize(b);
  }
}
BENCHMARK(BM_BeliefUpdate);

}  // namespace

BENCHMARK_MAIN();
