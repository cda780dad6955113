#include <benchmark/benchmark.h>

#include "metaband/complexity.hpp"
#include "metaband/dtece.hpp"
#include "metaband/ece.hpp"
#include "metaband/envsim.hpp"
#include "metaband/metatrain.hpp"
#include "metaband/tree.hpp"

using namespace metaband;

namespace {

BanditCollection rand_collection(std::size_t m, std::size_t k) {
  Rng rng(7);
  return make_rand(m, k, 0.4, rng).collection;
}

void BM_ClassificationCoefficient(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto coll = rand_collection(m, 2 * m);
  const auto tests = TestClass::all_arms(coll.num_arms());
  for (auto _ : state) benchmark::DoNotOptimize(classification_coefficient(coll, tests, 0.2));
}
BENCHMARK(BM_ClassificationCoefficient)->Arg(6)->Arg(10)->Arg(14);

void BM_RandomizedCoefficient(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto coll = rand_collection(m, 2 * m);
  const auto tests = TestClass::all_arms(coll.num_arms());
  for (auto _ : state) benchmark::DoNotOptimize(randomized_coefficient(coll, tests, 0.2));
}
BENCHMARK(BM_RandomizedCoefficient)->Arg(4)->Arg(6)->Arg(8);

void BM_BuildTree(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto coll = rand_collection(m, m);
  const auto means = coll.mean_table();
  for (auto _ : state) benchmark::DoNotOptimize(build_tree(means, 0.2));
}
BENCHMARK(BM_BuildTree)->Arg(10)->Arg(40);

void BM_MetaTrain(benchmark::State& state) {
  const auto coll = rand_collection(10, 20);
  MetaTrainConfig cfg;
  cfg.lambda = 0.4;
  cfg.gap = 0.4;
  cfg.n_est = static_cast<std::size_t>(state.range(0));
  const auto sims = simulators_for(coll);
  for (auto _ : state) benchmark::DoNotOptimize(meta_train(sims, cfg));
  state.SetItemsProcessed(state.iterations() * 200 * state.range(0));
}
BENCHMARK(BM_MetaTrain)->Arg(1000)->Arg(5000);

void BM_DtEceEpisode(benchmark::State& state) {
  const auto coll = rand_collection(40, 40);
  const auto est = exact_estimate(coll);
  const auto tree = build_tree(coll.mean_table(), 0.2);
  DtEceConfig cfg;
  cfg.horizon = 10000;
  cfg.lambda = 0.4;
  Rng rng(1);
  std::size_t task = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_dtece(coll, task, tree, est, cfg, rng));
    task = (task + 1) % coll.num_tasks();
  }
}
BENCHMARK(BM_DtEceEpisode);

void BM_EceEpisode(benchmark::State& state) {
  const auto coll = rand_collection(10, 20);
  EceConfig cfg;
  cfg.lambda = implied_hellinger_level(coll);
  Rng rng(1);
  std::size_t task = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_ece(coll, task, cfg, 10000, rng));
    task = (task + 1) % coll.num_tasks();
  }
}
BENCHMARK(BM_EceEpisode);

}  // namespace
BENCHMARK_MAIN();
