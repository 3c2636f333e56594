#include <random>
#include <string>

#include "benchmark/benchmark.h"

#include "infomech/fixtures.hpp"
#include "infomech/geometry.hpp"
#include "infomech/mechanisms.hpp"
#include "infomech/protocol.hpp"

namespace {

using namespace infomech;

void BM_InterestingPosteriors(benchmark::State& state) {
  const Context ctx = make_outcomes_gap_context();
  for (auto _ : state) {
    benchmark::DoNotOptimize(interesting_posteriors(ctx));
  }
}
BENCHMARK(BM_InterestingPosteriors);

void BM_PricingMappings52(benchmark::State& state) {
  const Context ctx = make_example_52();
  const PosteriorSet q = interesting_posteriors(ctx);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_pricing_mappings(ctx, q));
  }
}
BENCHMARK(BM_PricingMappings52);

void BM_PricingOutcomesGapContext(benchmark::State& state) {
  const Context ctx = make_outcomes_gap_context();
  const PosteriorSet q = interesting_posteriors(ctx);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_pricing_outcomes(ctx, q, true));
  }
}
BENCHMARK(BM_PricingOutcomesGapContext);

void BM_MappingsOnGrid(benchmark::State& state) {
  const Context ctx = make_example_52();
  const PosteriorSet q =
      grid_refinement(ctx, interesting_posteriors(ctx), state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_pricing_mappings(ctx, q));
  }
  state.SetLabel(std::to_string(q.points.size()) + " posteriors");
}
BENCHMARK(BM_MappingsOnGrid)->Arg(16)->Arg(64)->Arg(200);

void BM_FullSurplusContract(benchmark::State& state) {
  const Context ctx = make_example_42();
  for (auto _ : state) {
    benchmark::DoNotOptimize(full_surplus_contract(ctx));
  }
}
BENCHMARK(BM_FullSurplusContract);

void BM_BestResponse52(benchmark::State& state) {
  const Context ctx = make_example_52();
  const ProtocolTree tree = make_example_52_tree(ctx);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        best_response(ctx, tree, 0, BuyerStrategy::Mode::Uncommitted));
  }
}
BENCHMARK(BM_BestResponse52);

void BM_RevenueReport52(benchmark::State& state) {
  const Context ctx = make_example_52();
  for (auto _ : state) {
    benchmark::DoNotOptimize(revenue_report(ctx));
  }
}
BENCHMARK(BM_RevenueReport52);

void BM_SupportReductionB2(benchmark::State& state) {
  const Context ctx = make_quadratic_support_context(3, 0.05, 1e-4);
  const SolveResult rc =
      solve_pricing_mappings(ctx, interesting_posteriors(ctx));
  for (auto _ : state) {
    benchmark::DoNotOptimize(reduce_support(ctx, rc.menu));
  }
}
BENCHMARK(BM_SupportReductionB2);

}  // namespace

BENCHMARK_MAIN();
