#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kgspec/modes.hpp"
#include "oracles.hpp"

using namespace kgspec;

namespace {

double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double max_U_diff(const ModeTrajectory& x, const ModeTrajectory& y, const CoefficientProfile& p) {
  double worst = 0.0;
  for (std::size_t k = 0; k < x.times.size(); ++k) {
    const double d = (x.U(p, k) - y.U(p, k)).norm() / y.U(p, k).norm();
    worst = std::max(worst, d);
  }
  return worst;
}

}  // namespace

TEST_CASE("harmonic oscillator and free wave") {
  CoefficientProfile p(speed_constant(), mass_zero());
  auto tr = integrate_mode(p, 1.0, 1.0, 0.0, {std::numbers::pi, 50.0, 400.0});
  CHECK(tr.u[0].real() == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(rel_err(tr.u[1], std::cos(50.0)) < 1e-8);
  CHECK(std::abs(tr.u[2] - std::cos(400.0)) < 1e-7);
  CHECK(std::abs(tr.ut[2] + std::sin(400.0)) < 1e-7);

  auto fw = integrate_mode_direct(p, 2.0, 0.0, 1.0, {0.3, 7.0});
  CHECK(fw.u[0].real() == doctest::Approx(std::sin(0.6) / 2.0).epsilon(1e-10));
  CHECK(fw.u[1].real() == doctest::Approx(std::sin(14.0) / 2.0).epsilon(1e-9));
}

TEST_CASE("direct integration agrees with a fixed-step RK4 oracle") {
  CoefficientProfile p(speed_polynomial(1.0), mass_power(1.0, -1.0));
  const double xi = 0.8;
  auto w2 = [&](double t) {
    const double a = 1.0 + t, m = 1.0 / (1.0 + t);
    return xi * xi * a * a + m * m;
  };
  const auto [y, v] = oracle::rk4_oscillator(w2, 1.0, -0.5, 0.0, 6.0, 200000);
  auto tr = integrate_mode_direct(p, xi, 1.0, -0.5, {6.0});
  CHECK(tr.u[0].real() == doctest::Approx(y).epsilon(1e-8));
  CHECK(tr.ut[0].real() == doctest::Approx(v).epsilon(1e-8));
}

TEST_CASE("Z frame agrees with direct integration") {
  std::vector<double> times;
  for (double t = 1.0; t <= 2000.0; t *= 1.5) times.push_back(t);
  struct Case {
    CoefficientProfile p;
    double xi;
  };
  std::vector<Case> cases = {
      {CoefficientProfile(speed_constant(), mass_power(0.3, -1.0)), 0.5},
      {CoefficientProfile(speed_polynomial(1.0), mass_power(1.0, -1.0)), 0.3},
      {CoefficientProfile(speed_constant(), mass_log(0.5, 0.5)), 2.0},
      {CoefficientProfile(speed_polynomial(-0.5), mass_constant(1.0)), 0.2},
  };
  for (const auto& c : cases) {
    CAPTURE(c.p.speed_name());
    CAPTURE(c.p.mass_name());
    auto z = integrate_mode(c.p, c.xi, 1.0, 0.0, times);
    auto d = integrate_mode_direct(c.p, c.xi, 1.0, 0.0, times);
    CHECK(std::isfinite(z.switch_time));
    CHECK(z.switch_mismatch < 1e-6);
    CHECK(max_U_diff(z, d, c.p) < 1e-5);
    CHECK(z.steps < d.steps);
  }
}

TEST_CASE("Wronskian of the real fundamental pair is one") {
  CoefficientProfile p(speed_polynomial(0.5), mass_power(0.7, -0.5));
  for (double xi : {0.05, 1.0, 20.0}) {
    const Mat2 M = fundamental_real(p, xi, 2.0, 300.0);
    CHECK(M.determinant() == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("energy identity along a mode") {
  // d/dt E_{a,m} = (a a' xi^2 + m m') |u|^2.
  CoefficientProfile p(speed_polynomial(1.0), mass_power(1.0, -0.5));
  const double xi = 0.6;
  std::vector<double> times;
  const int n = 4000;
  for (int i = 0; i <= n; ++i) times.push_back(10.0 * i / n);
  auto tr = integrate_mode_direct(p, xi, cplx(1.0, 0.5), cplx(-0.2, 1.0), times);
  auto E = [&](std::size_t k) {
    const double t = times[k], a = p.a(t), m = p.m(t);
    return 0.5 * (std::norm(tr.ut[k]) + (a * a * xi * xi + m * m) * std::norm(tr.u[k]));
  };
  long double s = 0.0;
  const double h = 10.0 / n;
  for (int i = 0; i <= n; ++i) {
    const double t = times[i];
    const double g = (p.a(t) * p.a1(t) * xi * xi + p.m(t) * p.m1(t)) * std::norm(tr.u[i]);
    s += (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0)) * g;
  }
  const double integral = static_cast<double>(s * h / 3.0);
  CHECK(E(n) - E(0) == doctest::Approx(integral).epsilon(1e-8));
}

TEST_CASE("linearity: scaling the data scales the mode") {
  // Step control sees absolute magnitudes, so agreement is at tolerance level.
  CoefficientProfile p(speed_exponential(), mass_constant(1.0));
  const std::vector<double> times = {1.0, 5.0, 12.0};
  const cplx c(0.3, -2.0);
  auto a = integrate_mode(p, 0.4, 1.0, 0.5, times);
  auto b = integrate_mode(p, 0.4, c * 1.0, c * 0.5, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(rel_err(b.u[k], c * a.u[k]) < 1e-8);
    CHECK(rel_err(b.ut[k], c * a.ut[k]) < 1e-8);
  }
}

TEST_CASE("two-sided ratio is one for constant coefficients") {
  CoefficientProfile p(speed_constant(), mass_constant(1.0));
  auto tr = integrate_mode(p, 1.7, cplx(1.0, 0.2), cplx(0.1, -0.4), {0.0, 3.0, 100.0, 1000.0});
  for (std::size_t k = 1; k < 4; ++k) CHECK(two_sided_check(tr, 0, k, p) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("pseudo-zone fundamental solution") {
  const double mu0 = 0.3;
  CoefficientProfile p(speed_constant(), mass_power(mu0, -1.0));
  auto psi = build_psi(p);
  ZoneGeometry g;
  for (double xi : {0.1, 0.01, 0.001}) {
    const double theta = separating_time(g, p, xi);
    CHECK(theta == doctest::Approx(g.N / xi - 1.0));
    auto st = pseudo_zone_fundamental(p, psi, xi, theta, g);
    CHECK(st.sup_norm < 10.0);
    // E(t) V(0) reproduces the transformed mode.
    auto tr = integrate_mode_direct(p, xi, cplx(1.0, 0.0), cplx(0.0, 1.0), {0.0, theta});
    PseudoZoneState s0 = st;
    s0.t = 0.0;
    const Vec2c V0 = s0.V(tr.u[0], tr.ut[0], p, psi);
    const Vec2c Vt = st.V(tr.u[1], tr.ut[1], p, psi);
    const Vec2c pred = st.E.cast<cplx>() * V0;
    CHECK((pred - Vt).norm() < 1e-7 * Vt.norm());
  }
  CHECK_THROWS_AS(pseudo_zone_fundamental(p, psi, 0.1, 500.0, g), DomainError);
}

TEST_CASE("serial and parallel sweeps are identical") {
  CoefficientProfile p(speed_polynomial(1.0), mass_power(1.0, -1.0));
  auto m = gaussian_measure(1e-3, 5.0, 24, 3, 1.0);
  const std::vector<double> times = {0.0, 1.0, 10.0, 100.0};
  auto s = sweep_modes(p, m, times, {}, ExecutionPolicy::Serial);
  auto q = sweep_modes(p, m, times, {}, ExecutionPolicy::Parallel);
  REQUIRE(s.size() == q.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t k = 0; k < times.size(); ++k) {
      CHECK(s[i].u[k] == q[i].u[k]);
      CHECK(s[i].ut[k] == q[i].ut[k]);
    }
  }
  auto es = assemble_energies(s, p, std::nullopt, m.weight);
  auto eq = assemble_energies(q, p, std::nullopt, m.weight);
  CHECK(es.E_am == eq.E_am);
  CHECK(es.E_p.empty());
  // E_{a,m} at t = 0: 1/2 sum w (xi^2 + 1) |u0|^2.
  std::vector<double> ref;
  for (std::size_t i = 0; i < m.xi.size(); ++i) {
    ref.push_back(0.5 * m.weight[i] * (m.xi[i] * m.xi[i] + 1.0) * std::norm(m.u0[i]));
  }
  double r = 0.0;
  for (double v : ref) r += v;
  CHECK(es.E_am[0] == doctest::Approx(r).epsilon(1e-13));
}
