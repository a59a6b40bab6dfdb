#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "tame/envsim.hpp"
#include "tame/gnn.hpp"
#include "tame/morphology.hpp"

using namespace tame;

namespace {

std::vector<GraphSample> make_batch(EnvClass cls, int count, Rng& rng) {
  const auto env = default_env(cls);
  std::vector<GraphSample> out;
  while (static_cast<int>(out.size()) < count) {
    auto tree = sample_random(rng, cls, default_limits(cls));
    auto g = std::make_shared<const LineGraph>(to_line_graph(tree));
    const auto ep = run_episode(env, tree, rng());
    if (!ep.valid) continue;
    out.push_back(make_sample(g, ep));
  }
  return out;
}

void BM_Rollout(benchmark::State& state) {
  const auto cls = static_cast<EnvClass>(state.range(0));
  Rng rng(1);
  const auto env = default_env(cls);
  const auto tree = sample_random(rng, cls, default_limits(cls));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_episode(env, tree, seed++));
  state.SetItemsProcessed(state.iterations() * env.episode_len);
}
BENCHMARK(BM_Rollout)->Arg(static_cast<int>(EnvClass::arm))->Arg(static_cast<int>(EnvClass::locomotion2d));

void BM_Mutate(benchmark::State& state) {
  Rng rng(2);
  const auto cls = EnvClass::locomotion2d;
  const auto tree = sample_random(rng, cls, default_limits(cls));
  const auto params = default_mutation(cls);
  for (auto _ : state) benchmark::DoNotOptimize(mutate(tree, rng, params));
}
BENCHMARK(BM_Mutate);

void BM_LossAndGrad(benchmark::State& state) {
  Rng rng(3);
  const auto cls = EnvClass::locomotion2d;
  const auto batch = make_batch(cls, static_cast<int>(state.range(0)), rng);
  auto dims = classifier_dims_for(cls, static_cast<int>(state.range(1)));
  const auto params = reset(rng, dims);
  for (auto _ : state) benchmark::DoNotOptimize(grad(params, batch));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LossAndGrad)->Args({128, 64})->Args({128, 192})->Unit(benchmark::kMillisecond);

void BM_BatchLoglik(benchmark::State& state) {
  Rng rng(4);
  const auto cls = EnvClass::arm;
  const auto batch = make_batch(cls, 512, rng);
  const auto params = reset(rng, classifier_dims_for(cls));
  for (auto _ : state) benchmark::DoNotOptimize(batch_episode_loglik(params, batch, 128));
  state.SetItemsProcessed(state.iterations() * 512);
}
BENCHMARK(BM_BatchLoglik)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
