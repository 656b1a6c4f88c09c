#include <benchmark/benchmark.h>

#include "fbai/guarantees.hpp"
#include "fbai/montecarlo.hpp"
#include "fbai/policy.hpp"

namespace {

void BM_PolicyRun(benchmark::State& state) {
  const auto kind = static_cast<fbai::PolicyKind>(state.range(0));
  const auto inst = fbai::generate_instance(fbai::Family::Stair, 10);
  const std::int64_t T = state.range(1);
  fbai::RngStream rng(1, 0);
  for (auto _ : state) {
    auto out = fbai::run_policy(kind, inst, T, {}, rng);
    benchmark::DoNotOptimize(out.recommended);
  }
  state.SetLabel(std::string(fbai::to_string(kind)));
  state.SetItemsProcessed(state.iterations() * T);
}
BENCHMARK(BM_PolicyRun)->ArgsProduct({{0, 1, 2, 3, 4}, {5000}});

void BM_Guarantee(benchmark::State& state) {
  const auto kind = static_cast<fbai::GuaranteeKind>(state.range(0));
  const auto s = fbai::sort_desc(fbai::generate_instance(fbai::Family::Linear, state.range(1)));
  for (auto _ : state) {
    auto r = fbai::compute_guarantee(kind, s);
    benchmark::DoNotOptimize(r.rate);
  }
  state.SetLabel(std::string(fbai::to_string(kind)));
}
BENCHMARK(BM_Guarantee)->ArgsProduct({{0, 1, 2, 3, 4, 5}, {10, 100}});

void BM_EstimateCell(benchmark::State& state) {
  fbai::ExperimentConfig c;
  c.instance = fbai::generate_instance(fbai::Family::OneGroup, 10);
  c.algorithms = {{fbai::PolicyKind::CRA, {}}};
  c.budgets = {1000};
  c.runs = 1000;
  c.parallelism = 1;
  for (auto _ : state) {
    auto r = fbai::estimate_error(c);
    benchmark::DoNotOptimize(r.front().errors);
  }
}
BENCHMARK(BM_EstimateCell)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
