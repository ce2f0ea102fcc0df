#include <benchmark/benchmark.h>

#include "rumour/engine.hpp"
#include "rumour/estimators.hpp"
#include "rumour/oracles.hpp"
#include "rumour/reactivation.hpp"
#include "rumour/renewal.hpp"

using namespace rumour;

// Supercritical basic run; items are steps.
static void BM_BasicSteps(benchmark::State& state) {
  const RadiusField field(RadiusLaw::geometric_min1(0.5), 7);
  for (auto _ : state) benchmark::DoNotOptimize(basic_right_front(field, state.range(0)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BasicSteps)->Arg(1000)->Arg(100000);

static void BM_StepKeyedSteps(benchmark::State& state) {
  const RadiusField field(RadiusLaw::geometric_min1(0.5), 7, RadiusField::Keying::StepKeyed);
  for (auto _ : state) benchmark::DoNotOptimize(basic_right_front(field, state.range(0)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StepKeyedSteps)->Arg(100000);

static void BM_SubcriticalReplicate(benchmark::State& state) {
  const auto law = RadiusLaw::finite_support({0.5, 0.0, 0.5});
  std::int64_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(basic_replicate(law, SiteEnvironment::all_occupied(), 1, i++, 1000));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SubcriticalReplicate);

static void BM_ReactivationSteps(benchmark::State& state) {
  ReactParams p;
  p.law = RadiusLaw::finite_support({0.5, 0.5});
  p.p2 = 0.5;
  p.window = state.range(1) ? std::optional<Radius>(1) : std::nullopt;
  for (auto _ : state) {
    ReactivationState s = react_init(ReactShape::TwoSided, 0, p);
    while (s.n < state.range(0)) step_react(s, p);
    benchmark::DoNotOptimize(s.r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ReactivationSteps)->Args({2000, 0})->Args({2000, 1})->Args({100000, 1});

static void BM_DominationProbe(benchmark::State& state) {
  ReactParams p;
  p.law = RadiusLaw::finite_support({0.5, 0.5});
  p.p2 = 0.5;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    p.seed = ++seed;
    benchmark::DoNotOptimize(probe_domination(0, p, 500));
  }
}
BENCHMARK(BM_DominationProbe);

static void BM_RenewalScan(benchmark::State& state) {
  const RadiusField field(RadiusLaw::geometric_min1(0.5), 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(renewals_over_horizon(field, state.range(0), DepthPolicy::tail_budget(1e-12)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RenewalScan)->Arg(100000);

static void BM_ExactOracle(benchmark::State& state) {
  const EnumerationSpec spec{RadiusLaw::finite_support({0.5, 0.0, 0.5}), state.range(0)};
  for (auto _ : state) benchmark::DoNotOptimize(exact_basic_tables(spec));
}
BENCHMARK(BM_ExactOracle)->DenseRange(2, 4);

static void BM_PercolationCriterion(benchmark::State& state) {
  const auto law = RadiusLaw::polynomial_tail(2.0, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(percolation_criterion(law));
}
BENCHMARK(BM_PercolationCriterion);

static void BM_OvershootSample(benchmark::State& state) {
  const OvershootSampler sampler(RadiusLaw::geometric(0.5), DepthPolicy::tail_budget(1e-12));
  SplitMix64 rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(sampler(rng));
}
BENCHMARK(BM_OvershootSample);
BENCHMARK_MAIN();
