#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kgspec/scaleinv.hpp"

using namespace kgspec;

TEST_CASE("(ell, mutilde) and (alpha, mu) round trip") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> L(-0.9, 4.0), M(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double ell = L(rng), mt = M(rng);
    auto m = ScaleInvariantModel::from_polynomial(ell, mt);
    const auto [e2, m2] = polynomial_equivalent(m.alpha, m.mu);
    CHECK(e2 == doctest::Approx(ell).epsilon(1e-12));
    CHECK(m2 == doctest::Approx(mt).epsilon(1e-12));
    auto back = ScaleInvariantModel::from_alpha_mu(m.alpha, m.mu);
    CHECK(back.delta == doctest::Approx(m.delta).epsilon(1e-12));
  }
}

TEST_CASE("transformed modes map back to the direct solution") {
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> al(-0.5, 0.8), mu(0.0, 0.8), xi(0.1, 2.0);
  ModeOptions mo;
  mo.tol = 1e-12;
  const std::vector<double> ts{0.5, 3.0, 10.0};
  for (int i = 0; i < 8; ++i) {
    auto m = ScaleInvariantModel::from_alpha_mu(al(rng), mu(rng));
    const double x = xi(rng);
    auto tw = integrate_transformed_mode(m, x, cplx(1.0, 0.2), cplx(-0.3, 0.4), ts, 1e-12);
    auto td = integrate_mode_direct(m.profile(), x, cplx(1.0, 0.2), cplx(-0.3, 0.4), ts, mo);
    for (std::size_t k = 0; k < ts.size(); ++k) {
      CHECK(std::abs(tw.u[k] - td.u[k]) <= 1e-7 * std::abs(td.u[k]) + 1e-12);
      CHECK(std::abs(tw.ut[k] - td.ut[k]) <= 1e-7 * std::abs(td.ut[k]) + 1e-12);
    }
  }
}
