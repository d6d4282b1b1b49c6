#include <benchmark/benchmark.h>

#include <memory>

#include "gradphi/dynamics.hpp"
#include "gradphi/gibbs.hpp"
#include "gradphi/pde.hpp"

using namespace gradphi;

namespace {

// One Euler-Maruyama step of the tilted periodic system on an N^d torus.
void BM_EulerMaruyamaStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  TiltedPeriodicSystem sys(std::make_shared<const TorusLattice>(n, d),
                           Potential::cosine_perturbed(0.5, 1.0), std::vector<double>(d, 0.3), 1);
  const double dt = sys.max_step();
  for (auto _ : state) {
    sys.step(dt);
    benchmark::DoNotOptimize(sys.heights().values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(sys.lattice().num_sites()));
}
BENCHMARK(BM_EulerMaruyamaStep)->Args({64, 1})->Args({16, 2})->Args({64, 2})->Args({16, 3});

// One global MALA sweep (proposal plus accept/reject).
void BM_MalaSweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GibbsSampler s(std::make_shared<const TorusLattice>(n, 2), Potential::cosine_perturbed(0.2, 1.0),
                 {1.0, 0.0}, SamplerSettings{}, 2);
  for (auto _ : state) s.sweep();
  state.counters["acceptance"] = s.acceptance_rate();
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(n) * n);
}
BENCHMARK(BM_MalaSweep)->Arg(8)->Arg(16)->Arg(32);

// Explicit PDE solve over a fixed number of CFL steps in d = 2.
void BM_PdeSteps(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const PdeGrid grid(DomainSpec::box(2, {-0.5, -0.5}, {0.5, 0.5}), m,
                     [](const Point&) { return 0.0; });
  const ScalarFunction h0 = bump(2, {0.0, 0.0}, 0.3);
  const LinearFlux flux(1.0);
  const double dt = grid.spacing() * grid.spacing() / 4.0;
  for (auto _ : state) {
    const PdeSolution sol = solve(grid, h0, flux, 20 * dt, dt);
    benchmark::DoNotOptimize(sol.h.values().data());
  }
  state.SetItemsProcessed(state.iterations() * 20 *
                          static_cast<long long>(grid.interior_cells().size()));
}
BENCHMARK(BM_PdeSteps)->Arg(32)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
