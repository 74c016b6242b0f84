#include <benchmark/benchmark.h>

#include <random>

#include "powl/conformance.hpp"
#include "powl/discovery.hpp"
#include "powl/language.hpp"
#include "powl/sampling.hpp"
#include "powl/wfnet.hpp"
#include "random_model.hpp"

using namespace powl2;

namespace {

struct Workload {
  NodePtr model;
  EventLog log;
};

// Generated model over n activities and a sampled log of the given size.
Workload workload(std::size_t activities, std::size_t traces) {
  std::mt19937_64 rng(7 + activities);
  auto model = fixtures::random_model(rng, {activities, 4, true, true});
  return {model, sample_traces(*model, {traces, 11, 0.3})};
}

void BM_Discover(benchmark::State& state) {
  auto w = workload(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(discover(w.log));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.log.total()));
}
BENCHMARK(BM_Discover)->Args({6, 100})->Args({12, 1000})->Args({20, 5000});

void BM_DiscoverNoisy(benchmark::State& state) {
  auto w = workload(12, 2000);
  DiscoveryConfig config;
  config.noise_threshold = 0.2;
  for (auto _ : state) benchmark::DoNotOptimize(discover(w.log, config));
}
BENCHMARK(BM_DiscoverNoisy);

void BM_Membership(benchmark::State& state) {
  auto w = workload(static_cast<std::size_t>(state.range(0)), 500);
  for (auto _ : state) benchmark::DoNotOptimize(fitness(w.log, *w.model));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.log.total()));
}
BENCHMARK(BM_Membership)->Arg(6)->Arg(12)->Arg(20);

void BM_Soundness(benchmark::State& state) {
  auto w = workload(static_cast<std::size_t>(state.range(0)), 200);
  auto net = powl_to_wfnet(*discover(w.log));
  for (auto _ : state) benchmark::DoNotOptimize(check_soundness(net));
}
BENCHMARK(BM_Soundness)->Arg(6)->Arg(10);

void BM_Precision(benchmark::State& state) {
  auto w = workload(static_cast<std::size_t>(state.range(0)), 500);
  auto net = powl_to_wfnet(*discover(w.log));
  for (auto _ : state) benchmark::DoNotOptimize(precision(w.log, net));
}
BENCHMARK(BM_Precision)->Arg(6)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
