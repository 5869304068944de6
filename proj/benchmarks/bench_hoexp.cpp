#include <benchmark/benchmark.h>

#include <vector>

#include "hoexp/coupled_system.hpp"
#include "hoexp/oscillator_basis.hpp"
#include "hoexp/reference_oracles.hpp"
#include "hoexp/rk4_integrator.hpp"

using namespace hoexp;

namespace {

const RampSchedule kRamp{1.0, 1.0, RampVariant::RampUp};

CoefficientState spread_state(std::size_t slots) {
  CoefficientState s(BasisPolicy::fixed(slots), IndexLayout::EvenOnly, slots);
  for (std::size_t k = 0; k < slots; ++k) s[k] = {1.0 / static_cast<double>(k + 1), 0.5 / static_cast<double>(k + 1)};
  return s;
}

void BM_Rhs(benchmark::State& state) {
  const CoefficientState s = spread_state(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rhs(s, kRamp, OscillatorModel::unit(), 0.7));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Rhs)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_Rk4Step(benchmark::State& state) {
  const CoupledSystem system(OscillatorModel::unit(), kRamp, IndexLayout::EvenOnly);
  CoefficientState s = spread_state(static_cast<std::size_t>(state.range(0)));
  Rk4Stepper stepper;
  for (auto _ : state) {
    rk4_step(s, system, 1e-6, stepper);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_Rk4Step)->Arg(64)->Arg(512)->Arg(2048);

void BM_GrowingRunToBreakdown(benchmark::State& state) {
  CoupledSystem system(OscillatorModel::unit(), kRamp, IndexLayout::EvenOnly);
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(initial_state(BasisPolicy::growing()), StepperConfig::until(1e-3, 3.2), system));
  }
}
BENCHMARK(BM_GrowingRunToBreakdown)->Unit(benchmark::kMillisecond);

void BM_CrankNicolsonStep(benchmark::State& state) {
  const GridSpec grid{16.0, static_cast<std::size_t>(state.range(0))};
  GridPropagator propagator(OscillatorModel::unit(), kRamp, grid, 1e-4);
  GridWavefunction w = eigenstate_on_grid(OscillatorModel::unit(), 0, grid);
  for (auto _ : state) {
    propagator.step(w);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_CrankNicolsonStep)->Arg(1024)->Arg(4096);

void BM_HermiteTable(benchmark::State& state) {
  std::vector<ScaledValue> table(static_cast<std::size_t>(state.range(0)) + 1);
  for (auto _ : state) {
    normalized_hermite_table(1.0, 3.7, table);
    benchmark::DoNotOptimize(table.data());
  }
}
BENCHMARK(BM_HermiteTable)->Arg(100)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
