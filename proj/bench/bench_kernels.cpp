// Serial reference against the OpenMP path for the parallel kernels.
// Each benchmark takes the policy as its argument: 0 serial, 1 parallel.

#include <benchmark/benchmark.h>

#include "kgspec/modes.hpp"
#include "kgspec/scatter.hpp"
#include "kgspec/semilinear.hpp"

using namespace kgspec;

namespace {

ExecutionPolicy policy(const benchmark::State& s) {
  return s.range(0) ? ExecutionPolicy::Parallel : ExecutionPolicy::Serial;
}

void BM_sweep_modes(benchmark::State& state) {
  CoefficientProfile p(speed_polynomial(1.0), mass_constant(1.0));
  auto m = gaussian_measure(0.01, 10.0, 64, 1, 1e300);
  auto times = geometric_grid(0.0, 1e3, 200);
  const auto ref = sweep_modes(p, m, times, {}, ExecutionPolicy::Serial);
  for (auto _ : state) {
    auto tr = sweep_modes(p, m, times, {}, policy(state));
    if (tr.back().u.back() != ref.back().u.back()) state.SkipWithError("differs from serial");
    benchmark::DoNotOptimize(tr);
  }
}
BENCHMARK(BM_sweep_modes)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_propagator_estimate(benchmark::State& state) {
  for (auto _ : state) {
    clear_kernel_cache();
    auto r = check_kernel_bounds(1.0, {0.0, 1.0}, {0.5, 1.0, 2.0, 4.0}, 1.0, 2, 120, 1.0, policy(state));
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_propagator_estimate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_asymptotic_equivalence(benchmark::State& state) {
  CoefficientProfile p(speed_constant(), mass_power(1.0, -2.0));
  ScatterOptions o;
  o.test_mode = true;
  o.horizon = 2e3;
  auto band = gaussian_measure(1.0, 2.0, 8, 1, 1e300);
  std::vector<double> probe{100.0, 300.0, 1000.0};
  for (auto _ : state) {
    auto c = asymptotic_equivalence(p, band, 0.5, probe, 1e-10, o, policy(state));
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_asymptotic_equivalence)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_semilinear(benchmark::State& state) {
  const Grid g = resolving_grid(2, 64, 8.0);
  auto data = gaussian_data(g, 8.0, 1.0, 0.5);
  scale_to_d1(data, 1e-3);
  SemilinearOptions o;
  o.horizon = 2.0;
  const auto ref = solve_semilinear(data, o, ExecutionPolicy::Serial);
  for (auto _ : state) {
    auto r = solve_semilinear(data, o, policy(state));
    if (r.u_l2.back() != ref.u_l2.back()) state.SkipWithError("differs from serial");
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_semilinear)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
