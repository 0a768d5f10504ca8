// Serial reference vs OpenMP kernels on the 16-bus fixtures.

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>
#include <string>

#include "gridlocus/localizer.hpp"
#include "gridlocus/loss.hpp"
#include "gridlocus/regularizer.hpp"

using namespace gridlocus;

namespace {

GridCase fixture(const std::string& name) {
  std::ifstream in(std::string(GRIDLOCUS_DATA_DIR) + "/" + name);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_case(buf.str());
}

struct HessSetup {
  GridCase grid;
  InjectionVector s_bar;
  StateVector x;

  HessSetup() : grid(fixture("ring16_active.json")) {
    const StationaryPoint sp = minimize(grid, case_injections(grid), {0.1});
    s_bar = corrected_injections(case_injections(grid), sp);
    x = sp.x_star;
  }
};

const HessSetup& hess_setup() {
  static const HessSetup setup;
  return setup;
}

void BM_LossHessS_Serial(benchmark::State& state) {
  const auto& h = hess_setup();
  for (auto _ : state) benchmark::DoNotOptimize(loss_hess_s_serial(h.grid, h.s_bar, h.x));
}

void BM_LossHessS_Parallel(benchmark::State& state) {
  const auto& h = hess_setup();
  for (auto _ : state) benchmark::DoNotOptimize(loss_hess_s(h.grid, h.s_bar, h.x));
}

void BM_AlphaSweep_Serial(benchmark::State& state) {
  const GridCase grid = fixture("ring16_active.json");
  const InjectionVector s = case_injections(grid);
  for (auto _ : state) benchmark::DoNotOptimize(alpha_sweep_serial(grid, s, kDefaultAlphas));
}

void BM_AlphaSweep_Parallel(benchmark::State& state) {
  const GridCase grid = fixture("ring16_active.json");
  const InjectionVector s = case_injections(grid);
  for (auto _ : state) benchmark::DoNotOptimize(alpha_sweep(grid, s, kDefaultAlphas));
}

}  // namespace

BENCHMARK(BM_LossHessS_Serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_LossHessS_Parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AlphaSweep_Serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AlphaSweep_Parallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
