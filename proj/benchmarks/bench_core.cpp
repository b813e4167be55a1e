#include <benchmark/benchmark.h>

#include <random>

#include "dqs/bounds.hpp"
#include "dqs/fisher.hpp"
#include "dqs/matrix.hpp"
#include "dqs/privacy.hpp"
#include "dqs/protocol.hpp"
#include "dqs/rng.hpp"

namespace {

dqs::SymMatrix random_psd(int m, std::mt19937_64& rng) {
  dqs::SymMatrix a(m);
  for (int r = 0; r < m; ++r) {
    std::vector<double> v(m);
    for (auto& x : v) x = 2.0 * dqs::uniform01(rng) - 1.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j <= i; ++j) a.add(i, j, v[i] * v[j]);
  }
  return a;
}

dqs::protocol::ProtocolConfig bench_config(std::uint64_t events) {
  dqs::protocol::ProtocolConfig c;
  c.phases = {0.4, 0.5, 0.6, 0.3};
  c.visibilities = dqs::protocol::Visibilities::shared(0.968);
  c.events = events;
  c.seed = 7;
  return c;
}

void BM_eigensym(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto a = random_psd(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(dqs::eigensym(a, 1e-8));
}
BENCHMARK(BM_eigensym)->Arg(4)->Arg(8)->Arg(16);

void BM_pinv(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto a = random_psd(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(dqs::pinv(a, 1e-8));
}
BENCHMARK(BM_pinv)->Arg(4)->Arg(8);

void BM_privacy_quantifier(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const int m = static_cast<int>(state.range(0));
  const auto f = random_psd(m, rng);
  std::vector<double> w(m, 1.0 / m);
  const auto weights = dqs::WeightSet::single(w);
  for (auto _ : state)
    benchmark::DoNotOptimize(dqs::privacy_quantifier(f, weights, 1e-8));
}
BENCHMARK(BM_privacy_quantifier)->Arg(4)->Arg(8);

void BM_analytic_cfim(benchmark::State& state) {
  const auto config = bench_config(0);
  for (auto _ : state) benchmark::DoNotOptimize(dqs::protocol::analytic_cfim(config));
}
BENCHMARK(BM_analytic_cfim);

void BM_cfim_finite_difference(benchmark::State& state) {
  const auto config = bench_config(0);
  const auto model = dqs::protocol::probability_model(config, false);
  dqs::CfimOptions options;
  options.force_finite_difference = true;
  const std::vector<double> phases(config.phases.begin(), config.phases.end());
  for (auto _ : state) benchmark::DoNotOptimize(dqs::cfim(model, phases, options));
}
BENCHMARK(BM_cfim_finite_difference);

void BM_simulate(benchmark::State& state) {
  const auto config = bench_config(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dqs::protocol::simulate(config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_simulate)->Arg(10000)->Arg(100000);

void BM_fit_visibilities(benchmark::State& state) {
  auto base = bench_config(10000);
  base.phases = {0, 0, 0, 0};
  const auto scan = dqs::protocol::simulate_scan(base, 21);
  for (auto _ : state) benchmark::DoNotOptimize(dqs::protocol::fit_visibilities(scan));
}
BENCHMARK(BM_fit_visibilities);

void BM_crb_scalar(benchmark::State& state) {
  const auto f = dqs::protocol::analytic_cfim(bench_config(0));
  const std::vector<double> w = {0.25, 0.25, 0.25, 0.25};
  for (auto _ : state) benchmark::DoNotOptimize(dqs::crb_scalar(f, w, 1e-8));
}
BENCHMARK(BM_crb_scalar);

}  // namespace

BENCHMARK_MAIN();
