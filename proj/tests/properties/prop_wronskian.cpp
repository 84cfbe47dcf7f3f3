#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kgspec/modes.hpp"
#include "kgspec/semilinear.hpp"

using namespace kgspec;

TEST_CASE("kernel Wronskian is one") {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> xi(0.0, 3.0), s(0.0, 2.0), dt(0.0, 3.0), m(0.0, 2.0);
  for (int i = 0; i < 40; ++i) {
    const double s0 = s(rng), t = s0 + dt(rng), mm = m(rng);
    auto k = linear_kernels(mm, s0, t, xi(rng));
    CHECK(k.K0 * k.K1_t - k.K1 * k.K0_t == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("real fundamental matrix has unit determinant") {
  // u'' + <xi>^2 u = 0 has no first-order term, so det is constant.
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> xi(0.05, 4.0), t(0.5, 20.0);
  const CoefficientProfile profiles[] = {
      {speed_polynomial(1.0), mass_constant(1.0)},
      {speed_constant(), mass_log(0.5, 0.5)},
      {speed_exponential(), mass_power(1.0, 2.0)},
  };
  ModeOptions mo;
  mo.tol = 1e-12;
  for (const auto& p : profiles) {
    for (int i = 0; i < 8; ++i) {
      const double tt = p.speed_name() == speed_exponential().name ? 0.3 * t(rng) : t(rng);
      const Mat2 F = fundamental_real(p, xi(rng), 0.0, tt, mo);
      CHECK(F.determinant() == doctest::Approx(1.0).epsilon(1e-7));
    }
  }
}
