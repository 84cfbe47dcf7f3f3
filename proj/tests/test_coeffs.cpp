#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kgspec/coeffs.hpp"
#include "kgspec/config.hpp"
#include "oracles.hpp"

using namespace kgspec;

TEST_CASE("primitive: closed forms") {
  CoefficientProfile c(speed_constant(), mass_zero());
  CHECK(c.primitive(3.0) == doctest::Approx(4.0).epsilon(1e-15));
  CoefficientProfile e(speed_exponential(), mass_zero());
  CHECK(e.primitive(1.0) == doctest::Approx(std::numbers::e).epsilon(1e-15));
}

TEST_CASE("primitive: sqrt speed against a Simpson oracle") {
  const double ref = 1.0 + oracle::simpson([](double t) { return std::sqrt(1.0 + t); }, 0.0, 3.0);
  CHECK(ref == doctest::Approx(1.0 + 14.0 / 3.0).epsilon(1e-12));
  CoefficientProfile closed(speed_polynomial(0.5), mass_zero());
  CHECK(closed.primitive(3.0) == doctest::Approx(ref).epsilon(1e-12));
  CoefficientProfile quad(speed_expression("sqrt(1+t)"), mass_zero());
  CHECK_FALSE(quad.has_closed_primitive());
  CHECK(quad.primitive(3.0) == doctest::Approx(ref).epsilon(1e-12));
  // Memo checkpoints must not change repeated answers.
  CHECK(quad.primitive(3.0) == quad.primitive(3.0));
  CHECK(quad.primitive(1e-3) == doctest::Approx(1.0 + 2.0 / 3.0 * (std::pow(1.001, 1.5) - 1.0)).epsilon(1e-13));
}

TEST_CASE("eta and mu") {
  CoefficientProfile p(speed_constant(), mass_power(1.0, -1.0));
  auto [e0, m0] = p.eta_mu(0.0);
  CHECK(e0 == 1.0);
  CHECK(m0 == 1.0);

  CoefficientProfile x(speed_exponential(), mass_constant(1.0));
  auto [e20, m20] = x.eta_mu(20.0);
  CHECK(std::abs(e20 - 1.0) < 1e-6);
  CHECK(std::abs(m20 - 1.0) < 1e-6);

  CoefficientProfile q(speed_polynomial(2.0), mass_zero());
  const double A1 = 1.0 + oracle::simpson([](double t) { return (1 + t) * (1 + t); }, 0.0, 1.0);
  CHECK(q.eta(1.0) == doctest::Approx(4.0 / A1).epsilon(1e-12));
  CHECK(q.eta(1.0) == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("hypothesis 1 on the polynomial family matches the symbolic ratio") {
  const double ell = 2.0;
  CoefficientProfile p(speed_polynomial(ell), mass_zero());
  auto grid = linear_grid(0.0, 50.0, 501);
  auto r = check_hypothesis1(p, grid);
  double c1 = 0.0, c2 = 0.0;
  for (double t : grid) {
    const double A = 1.0 + (std::pow(1 + t, ell + 1) - 1.0) / (ell + 1);
    c1 = std::max(c1, ell * A / std::pow(1 + t, ell + 1));
    c2 = std::max(c2, ell * (ell - 1) * A * A / std::pow(1 + t, 2 * ell + 2));
  }
  CHECK(r.clauses[0].constant == doctest::Approx(c1).epsilon(1e-8));
  CHECK(r.clauses[1].constant == doctest::Approx(c2).epsilon(1e-8));
  CHECK(r.clauses[0].satisfied);
  CHECK(r.clauses[3].heuristic);
}

TEST_CASE("hypothesis 1 for exponential speed has C1 = 1") {
  CoefficientProfile p(speed_exponential(), mass_zero());
  auto r = check_hypothesis1(p, linear_grid(0.0, 20.0, 201));
  CHECK(r.clauses[0].constant == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.satisfied());
}

TEST_CASE("hypothesis 1 fails for a fast oscillating speed") {
  CoefficientProfile p(speed_oscillating(), mass_zero());
  auto r = check_hypothesis1(p, linear_grid(0.0, 8.0, 4001));
  CHECK(r.clauses[0].constant > 1e3);
  CHECK_FALSE(r.clauses[0].satisfied);
}

TEST_CASE("hypothesis 2") {
  CoefficientProfile si(speed_polynomial(1.0), mass_scale_invariant(0.3));
  auto r = check_hypothesis2(si, linear_grid(0.0, 100.0, 1001));
  CHECK(r.clauses[0].constant < 1e-10);
  CHECK(r.satisfied());

  CoefficientProfile old(speed_constant(), mass_log(0.5, 0.5));
  CHECK(check_hypothesis2(old, linear_grid(0.0, 100.0, 1001)).satisfied());

  CoefficientProfile osc(speed_constant(), mass_oscillating_mu());
  auto ro = check_hypothesis2(osc, linear_grid(0.0, 100.0, 10001));
  CHECK_FALSE(ro.clauses[0].satisfied);
}

TEST_CASE("analytic mass derivatives agree with finite differences") {
  std::vector<CoefficientProfile> ps{
      {speed_polynomial(1.5), mass_scale_invariant(0.4)},
      {speed_constant(), mass_log(0.7, 0.4)},
      {speed_polynomial(-0.5), mass_power(2.0, -1.3)},
      {speed_scale_invariant(0.5, 0.5), mass_scale_invariant(0.2)},
      {speed_polynomial(0.5), mass_oscillating_mu()},
  };
  for (const auto& p : ps) {
    // sin(t^2) defeats finite differences at late times.
    const double tmax = p.mass_name() == "oscillating_mu" ? 2.0 : 17.0;
    for (double t : {0.3, 2.0, tmax}) {
      auto m = [&](double s) { return p.m(s); };
      auto mu = [&](double s) { return p.mu(s); };
      CHECK(p.m1(t) == doctest::Approx(central_d1(m, t)).epsilon(1e-6));
      CHECK(p.m2(t) == doctest::Approx(central_d2(m, t)).epsilon(1e-4));
      CHECK(p.mu1(t) == doctest::Approx(central_d1(mu, t)).epsilon(1e-6));
      auto a = [&](double s) { return p.a(s); };
      CHECK(p.a1(t) == doctest::Approx(central_d1(a, t)).epsilon(1e-6));
    }
  }
}

TEST_CASE("scale-invariant speed: a'/a = alpha a/A and A(0) = A0") {
  for (double alpha : {-0.5, 0.0, 0.5, 1.0}) {
    CoefficientProfile p(speed_scale_invariant(alpha, 0.5), mass_zero());
    CHECK(p.primitive(0.0) == doctest::Approx(0.5));
    CHECK(p.a(0.0) == doctest::Approx(1.0));
    for (double t : {0.1, 1.0, 5.0}) {
      CHECK(p.a1(t) / p.a(t) == doctest::Approx(alpha * p.a(t) / p.primitive(t)).epsilon(1e-12));
      const double A = 0.5 + oracle::simpson([&](double s) { return p.a(s); }, 0.0, t, 20000);
      CHECK(p.primitive(t) == doctest::Approx(A).epsilon(1e-10));
    }
  }
}

TEST_CASE("property: primitive is monotone, A' = a, eta A = a") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> ell(-0.9, 3.0), tt(0.0, 40.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double l = ell(rng);
    std::vector<CoefficientProfile> ps{
        {speed_polynomial(l), mass_zero()},
        {speed_expression("(1+t)^" + std::to_string(l)), mass_zero()}};
    for (const auto& p : ps) {
      double t1 = tt(rng), t2 = tt(rng);
      if (t1 > t2) std::swap(t1, t2);
      if (t1 == t2) continue;
      CHECK(p.primitive(t2) > p.primitive(t1));
      const double d = central_d1([&](double s) { return p.primitive(s); }, t1);
      CHECK(d == doctest::Approx(p.a(t1)).epsilon(1e-6));
      CHECK(p.eta(t1) * p.primitive(t1) == doctest::Approx(p.a(t1)).epsilon(1e-15));
    }
  }
}

TEST_CASE("config builds profiles and rejects bad input") {
  auto c = Config::parse("# comment\nfamily = \"polynomial\"\nell = 2.0\nmass = power\nmu0 = 1\nmass_exp = -2\n");
  auto p = profile_from_config(c);
  CHECK(p.a(1.0) == doctest::Approx(4.0));
  CHECK(p.m(1.0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(Config::parse("just words"), DomainError);
  CHECK_THROWS_AS(profile_from_config(Config::parse("speed = bogus")), DomainError);
  CHECK_THROWS_AS(Config::parse("x = abc").num("x"), DomainError);
  CHECK_THROWS_AS(speed_expression("sin(t"), DomainError);
}

TEST_CASE("expression parser") {
  CoefficientProfile p(speed_expression("2 + sin(3*t)^2 - -1"), mass_expression("exp(-t/2)"));
  CHECK(p.a(0.7) == doctest::Approx(3.0 + std::pow(std::sin(2.1), 2)));
  CHECK(p.m(2.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(p.a1(0.7) == doctest::Approx(6.0 * std::sin(2.1) * std::cos(2.1)).epsilon(1e-7));
}

TEST_CASE("normalization warnings") {
  CoefficientProfile p(speed_oscillating(), mass_constant(2.0));
  CHECK(p.normalization_warnings().size() == 2);
  CoefficientProfile q(speed_constant(), mass_constant(1.0));
  CHECK(q.normalization_warnings().empty());
}
