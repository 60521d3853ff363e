#include <benchmark/benchmark.h>

#include <cstddef>
#include <string>
#include <vector>

#include "alignbounds/bestofn.hpp"
#include "alignbounds/divergence.hpp"
#include "alignbounds/finite_dist.hpp"
#include "alignbounds/rng.hpp"
#include "alignbounds/tilt.hpp"

namespace {

using namespace alignbounds;

FiniteDist fixture_dist(std::size_t k, std::uint64_t seed) {
  RngStream rng(RngSeed{seed});
  std::vector<std::string> names(k);
  std::vector<double> w(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    names[i] = "s" + std::to_string(i);
    w[i] = 0.05 + rng.next_double();
    total += w[i];
  }
  for (double& v : w) v /= total;
  double sum = 0.0;
  for (double v : w) sum += v;
  w[0] += 1.0 - sum;
  return FiniteDist(std::move(names), std::move(w));
}

RewardMap fixture_reward(std::size_t k, std::uint64_t seed) {
  RngStream rng(RngSeed{seed});
  std::vector<double> r(k);
  for (double& v : r) v = -2.0 + 4.0 * rng.next_double();
  return RewardMap(std::move(r));
}

void BM_bestofn_exact(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const auto dist = fixture_dist(k, 1);
  const auto reward = fixture_reward(k, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(bestofn_exact(dist, reward, n));
}
BENCHMARK(BM_bestofn_exact)
    ->Args({16, 8})
    ->Args({64, 64})
    ->Args({256, 512});

void BM_f_bound_generic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto gen = FGenerator::kl();
  for (auto _ : state) benchmark::DoNotOptimize(f_bound_generic(gen, n));
}
BENCHMARK(BM_f_bound_generic)->Arg(4)->Arg(32)->Arg(256);

void BM_solve_lambda(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto dist = fixture_dist(k, 3);
  const auto reward = fixture_reward(k, 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_lambda(dist, reward, 0.5));
}
BENCHMARK(BM_solve_lambda)->Arg(16)->Arg(256);

void BM_sampling(benchmark::State& state) {
  const auto dist = fixture_dist(64, 5);
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(dist.sample_indices(1024, RngSeed{seed++}));
}
BENCHMARK(BM_sampling);

void BM_renyi(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto p = fixture_dist(k, 6);
  const auto q = fixture_dist(k, 7);
  for (auto _ : state) benchmark::DoNotOptimize(renyi(p, q, 2.0));
}
BENCHMARK(BM_renyi)->Arg(16)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
