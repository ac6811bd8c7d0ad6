#include <benchmark/benchmark.h>

#include <sstream>
#include <string>
#include <vector>

#include "benchdiag/benchdiag.hpp"

namespace benchdiag {
namespace {

ServiceProfile three_stage_profile() {
  return ServiceProfile({{"web", 0.0035}, {"app", 0.005}, {"db", 0.002}}, 10.0);
}

LoadSeries sampled_series(int n_max, int stride) {
  const auto curves = solve_reference(three_stage_profile(), n_max);
  std::vector<LoadPoint> points;
  for (const auto& row : curves.rows) {
    if (row.n % stride == 0 || row.n == 1) points.push_back({row.n, row.x, row.r});
  }
  return LoadSeries(std::move(points), 10.0);
}

void BM_SolveReference(benchmark::State& state) {
  const auto profile = three_stage_profile();
  const int n_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_reference(profile, n_max));
  }
  state.SetItemsProcessed(state.iterations() * n_max);
}
BENCHMARK(BM_SolveReference)->RangeMultiplier(10)->Range(10, 100000);

void BM_SolveOracle(benchmark::State& state) {
  const ServiceProfile profile({{"a", 0.01}, {"b", 0.02}, {"c", 0.015}, {"d", 0.005}}, 1.0);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_oracle(profile, n));
  }
}
BENCHMARK(BM_SolveOracle)->DenseRange(2, kOracleMaxUsers, 5);

void BM_ParseSeries(benchmark::State& state) {
  std::ostringstream out;
  serialize_series(out, sampled_series(static_cast<int>(state.range(0)), 1));
  const std::string text = out.str();
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_series(text));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_ParseSeries)->Arg(1000)->Arg(20000);

void BM_Diagnose(benchmark::State& state) {
  const auto series = sampled_series(20000, static_cast<int>(state.range(0)));
  const std::optional<ServiceProfile> profile = three_stage_profile();
  for (auto _ : state) {
    benchmark::DoNotOptimize(diagnose(series, profile));
  }
  state.SetLabel(std::to_string(series.points().size()) + " points");
}
BENCHMARK(BM_Diagnose)->Arg(1)->Arg(100);

}  // namespace
}  // namespace benchdiag

BENCHMARK_MAIN();
