#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kgspec/modes.hpp"

using namespace kgspec;

TEST_CASE("modes are linear in the data") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> c(-2.0, 2.0), xi(0.05, 3.0);
  const CoefficientProfile p(speed_exponential(), mass_constant(1.0));
  const std::vector<double> ts{0.5, 3.0, 8.0};
  for (int i = 0; i < 10; ++i) {
    const double x = xi(rng);
    const cplx k(c(rng), c(rng)), a0(c(rng), c(rng)), a1(c(rng), c(rng)), b0(c(rng), c(rng)), b1(c(rng), c(rng));
    auto A = integrate_mode(p, x, a0, a1, ts);
    auto B = integrate_mode(p, x, b0, b1, ts);
    auto S = integrate_mode(p, x, k * a0 + b0, k * a1 + b1, ts);
    for (std::size_t j = 0; j < ts.size(); ++j) {
      const cplx want = k * A.u[j] + B.u[j];
      CHECK(std::abs(S.u[j] - want) <= 1e-7 * (std::abs(k * A.u[j]) + std::abs(B.u[j])));
    }
  }
}

TEST_CASE("energies scale quadratically") {
  const CoefficientProfile p(speed_polynomial(1.0), mass_constant(1.0));
  auto m = gaussian_measure(0.1, 5.0, 12, 2, 1.0);
  auto m2 = m;
  for (auto& v : m2.u0) v *= 3.0;
  for (auto& v : m2.u1) v *= 3.0;
  const std::vector<double> ts{0.0, 5.0, 50.0};
  auto e = assemble_energies(sweep_modes(p, m, ts, {}, ExecutionPolicy::Serial), p, std::nullopt, m.weight);
  auto e2 = assemble_energies(sweep_modes(p, m2, ts, {}, ExecutionPolicy::Serial), p, std::nullopt, m2.weight);
  for (std::size_t k = 0; k < ts.size(); ++k) CHECK(e2.E_am[k] == doctest::Approx(9.0 * e.E_am[k]).epsilon(1e-7));
}
