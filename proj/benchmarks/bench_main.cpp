#include <benchmark/benchmark.h>

#include <random>

#include "fsqkd/privacy.hpp"
#include "fsqkd/quantum_sim.hpp"
#include "fsqkd/randcheck.hpp"
#include "fsqkd/reconcile.hpp"
#include "fsqkd/session.hpp"

using namespace fsqkd;

namespace {

LinkParams reduced_day() {
  LinkParams lp;
  lp.tx.mu = 0.29;
  lp.ch = {1.0, 0.024, 5.0};
  return lp;
}

BitString random_key(std::size_t n, std::uint64_t seed, double p1 = 0.5) {
  std::mt19937_64 g(seed);
  std::bernoulli_distribution b(p1);
  BitString k(n);
  for (std::size_t i = 0; i < n; ++i) k.set(i, b(g));
  return k;
}

}  // namespace

static void BM_SimulateTransmission(benchmark::State& state) {
  const auto lp = reduced_day();
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_transmission(lp, seed++));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(lp.tx.clock_rate_hz));
}
BENCHMARK(BM_SimulateTransmission)->Unit(benchmark::kMillisecond);

static void BM_Correct(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto alice = random_key(n, 1);
  auto bob = alice;
  const auto flips = random_key(n, 2, 0.03);
  for (std::size_t i = 0; i < n; ++i) {
    if (flips[i]) bob.flip(i);
  }
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(correct(alice, bob, 0.03, seed++));
}
BENCHMARK(BM_Correct)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_Extract(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto key = random_key(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(extract(key, n / 3, {1, 2}));
}
BENCHMARK(BM_Extract)->Arg(651)->Arg(10000)->Unit(benchmark::kMicrosecond);

static void BM_Fips(benchmark::State& state) {
  const auto bits = random_key(20000, 4);
  for (auto _ : state) benchmark::DoNotOptimize(fips_140_2(bits));
}
BENCHMARK(BM_Fips);

static void BM_Session(benchmark::State& state) {
  SessionConfig c;
  c.link = reduced_day();
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_session(c));
    ++c.seed;
  }
}
BENCHMARK(BM_Session)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
