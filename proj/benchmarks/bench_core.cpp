#include <benchmark/benchmark.h>

#include "objhc/hc.hpp"
#include "objhc/objectives.hpp"
#include "objhc/partitioner.hpp"

namespace {

using namespace objhc;

EmbeddingSet mixture(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  return gen_mixture(10, n / 10, 32, 10.0, 3);
}

void BM_EvalMw(benchmark::State& state) {
  const auto data = mixture(state);
  const auto maps = build_feature_maps(data, Measure::cos_sim(), 0);
  const auto tree = random_binary_tree(static_cast<int>(data.size()), 1);
  for (auto _ : state) benchmark::DoNotOptimize(eval_mw(tree, maps));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EvalMw)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity(benchmark::oNLogN);

void BM_EvalCkmm(benchmark::State& state) {
  const auto data = mixture(state);
  const auto maps = build_feature_maps(data, Measure::l2_squared(), 0);
  const auto tree = random_binary_tree(static_cast<int>(data.size()), 1);
  for (auto _ : state) benchmark::DoNotOptimize(eval_ckmm(tree, maps));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EvalCkmm)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity(benchmark::oNLogN);

void BM_GdPartition(benchmark::State& state) {
  const auto data = mixture(state);
  const auto maps = build_feature_maps(data, Measure::cos_sim(), 0);
  PartitionConfig cfg;
  cfg.delta = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(gd_partition(maps, cfg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GdPartition)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Complexity()
    ->Unit(benchmark::kMillisecond);

void BM_Bppc(benchmark::State& state) {
  const auto data = mixture(state);
  HcConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(bppc(data, Measure::cos_sim(), cfg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Bppc)->RangeMultiplier(2)->Range(2500, 10000)->Complexity()
    ->Unit(benchmark::kMillisecond);

void BM_AverageLinkage(benchmark::State& state) {
  const auto data = mixture(state);
  for (auto _ : state) benchmark::DoNotOptimize(hac(data, Measure::cos_sim(), Linkage::Average));
}
BENCHMARK(BM_AverageLinkage)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
