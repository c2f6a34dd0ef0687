#include <benchmark/benchmark.h>

#include <cmath>

#include "ccmin/catalog.hpp"
#include "ccmin/rearrange.hpp"
#include "ccmin/solve.hpp"

using namespace ccmin;

namespace {

Field gaussian(const GridPtr& g) {
  return Field::from_radial(g, [](double r) { return std::exp(-r * r / 2); });
}

void BM_CoulombEnergy(benchmark::State& state) {
  auto g = Grid::make(GridSpec::radial(3, 20.0, static_cast<std::size_t>(state.range(0))));
  const Field u = gaussian(g);
  for (auto _ : state) benchmark::DoNotOptimize(coulomb_energy(u));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CoulombEnergy)->RangeMultiplier(4)->Range(512, 32768)->Complexity();

void BM_EnergyGradient(benchmark::State& state) {
  const ProblemSpec p = ProblemSpec::choquard(GridSpec::radial(3, 20.0, static_cast<std::size_t>(state.range(0))),
                                              make_lagrangian("j_quad_plus_quartic"));
  const Field u = gaussian(Grid::make(p.grid));
  for (auto _ : state) benchmark::DoNotOptimize(energy_gradient(p, u));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EnergyGradient)->RangeMultiplier(4)->Range(512, 32768)->Complexity();

void BM_EnergyGradientCylindrical(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ProblemSpec p = ProblemSpec::badiale_rolando(GridSpec::cylindrical(2, 3, 20.0, 20.0, n, n), 1.0,
                                                     make_nonlinearity("F_saturable"));
  const Field u = gaussian(Grid::make(p.grid));
  for (auto _ : state) benchmark::DoNotOptimize(energy_gradient(p, u));
}
BENCHMARK(BM_EnergyGradientCylindrical)->Arg(64)->Arg(128)->Arg(256);

void BM_SchwarzRearrange(benchmark::State& state) {
  auto g = Grid::make(GridSpec::radial(3, 20.0, static_cast<std::size_t>(state.range(0))));
  const Field u = Field::from_radial(g, [](double r) { return std::exp(-(r - 5) * (r - 5)) + 0.5 * std::exp(-r); });
  for (auto _ : state) benchmark::DoNotOptimize(schwarz_rearrange(u));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SchwarzRearrange)->RangeMultiplier(4)->Range(512, 32768)->Complexity();

void BM_SolveSoliton(benchmark::State& state) {
  const ProblemSpec p = ProblemSpec::stuart(GridSpec::line(40.0, 4096),
                                            make_nonlinearity("F_power", {{"A", 0.25}, {"d", 0.0}, {"alpha", 2.0}}));
  SolveConfig cfg;
  cfg.grad_tol = 1e-7;
  cfg.record_trace = false;
  for (auto _ : state) benchmark::DoNotOptimize(minimize_constrained(p, 4.0, cfg).m_value);
}
BENCHMARK(BM_SolveSoliton)->Unit(benchmark::kMillisecond);

void BM_SolveChoquard(benchmark::State& state) {
  const ProblemSpec p = ProblemSpec::choquard(GridSpec::radial(3), make_lagrangian("j_quadratic"));
  SolveConfig cfg;
  cfg.record_trace = false;
  for (auto _ : state) benchmark::DoNotOptimize(minimize_constrained(p, 1.0, cfg).m_value);
}
BENCHMARK(BM_SolveChoquard)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
