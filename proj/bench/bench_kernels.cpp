#include <benchmark/benchmark.h>

#include "hcl/bootstrap_kernels.hpp"
#include "hcl/estimators.hpp"
#include "hcl/simulation.hpp"

namespace {

hcl::BootstrapSpec make_spec(std::size_t B) {
  static const auto hcd = hcl::HistoricalData::from_counts(
      std::vector<double>{15, 10, 12, 17, 11, 21, 13, 12, 17, 10}, std::vector<double>(10, 50.0));
  hcl::BootstrapSpec spec;
  spec.estimates = hcl::estimate_betabinomial(hcd);
  spec.design = hcd.cluster_design();
  spec.n_star = 50;
  spec.B = B;
  spec.stream = hcl::RngStream{7, 0};
  return spec;
}

hcl::Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? hcl::Execution::Serial : hcl::Execution::Parallel;
}

void BM_DrawBootstrap(benchmark::State& state) {
  const auto spec = make_spec(10000);
  for (auto _ : state) benchmark::DoNotOptimize(hcl::draw_bootstrap(spec, exec_of(state)));
}
BENCHMARK(BM_DrawBootstrap)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_TailCoverage(benchmark::State& state) {
  const auto bs = hcl::draw_bootstrap(make_spec(100000), hcl::Execution::Serial);
  double q = 1.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hcl::lower_tail_coverage(bs, q, exec_of(state)));
    benchmark::DoNotOptimize(hcl::upper_tail_coverage(bs, q, exec_of(state)));
  }
}
BENCHMARK(BM_TailCoverage)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_CoverageSimulation(benchmark::State& state) {
  hcl::SimulationSetting s;
  s.H = 10;
  s.pi = 0.1;
  s.phi = 3.0;
  s.S = 200;
  s.methods = {hcl::Method::HistoricalRange, hcl::Method::NpChart, hcl::Method::BbUncalibrated};
  for (auto _ : state) benchmark::DoNotOptimize(hcl::run_setting(s, exec_of(state)));
}
BENCHMARK(BM_CoverageSimulation)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
