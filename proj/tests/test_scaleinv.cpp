#include <doctest.h>

#include <cmath>
#include <random>

#include "kgspec/scaleinv.hpp"

using namespace kgspec;

TEST_CASE("delta and secondary transform on the worked examples") {
  const double mu = 0.7;
  auto ex = ScaleInvariantModel::from_alpha_mu(1.0, mu);
  CHECK(ex.delta == doctest::Approx(-4.0 * mu * mu));
  auto f = transform_to_dissipative(ex);
  CHECK(f.potential_branch);
  CHECK(f.w_potential == doctest::Approx((1.0 + 4.0 * mu * mu) / 4.0));
  CHECK(f.sigma == doctest::Approx(0.5 - 0.25 + mu * mu));
  CHECK(f.damping == 1.0);
  CHECK(f.tau0 == 0.0);

  auto fw = transform_to_dissipative(ScaleInvariantModel::from_alpha_mu(0.0, 0.0));
  CHECK_FALSE(fw.potential_branch);
  CHECK(fw.sigma == doctest::Approx(1.0));
  CHECK(fw.w_damping == doctest::Approx(2.0));

  auto poly = ScaleInvariantModel::from_polynomial(1.0, 0.3);
  CHECK(poly.alpha == 0.5);
  CHECK(poly.delta == doctest::Approx(0.16).epsilon(1e-14));
  CHECK(poly.delta == doctest::Approx((1.0 - 4.0 * 0.09) / 4.0).epsilon(1e-14));
  CHECK(transform_to_dissipative(poly).tau0 == doctest::Approx(-0.5));

  auto half = ScaleInvariantModel::from_alpha_mu(0.3, 0.2, 0.4);
  CHECK(transform_to_dissipative(half).tau0 == doctest::Approx(-0.6));
  CHECK_THROWS_AS(ScaleInvariantModel::from_alpha_mu(1.5, 0.1), DomainError);
  CHECK_THROWS_AS(ScaleInvariantModel::from_alpha_mu(0.5, 0.1, 1.5), DomainError);
}

TEST_CASE("transformed equations follow from substitution") {
  // Plug v = x^e w into v'' + alpha/x v' + mu^2/x^2 v + k^2 v and compare with the
  // stated w equation for a test function w = x^b.
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-0.8, 0.95), M(0.0, 0.8), B(-2.0, 2.0), X(0.5, 5.0);
  for (int i = 0; i < 200; ++i) {
    auto m = ScaleInvariantModel::from_alpha_mu(U(rng), M(rng));
    auto f = transform_to_dissipative(m);
    const double b = B(rng), x = X(rng), e = f.w_exponent;
    const double c = e + b;  // v = x^c
    const double lhs_v = c * (c - 1) + m.alpha * c + m.mu * m.mu;  // times x^(c-2)
    const double lhs_w = b * (b - 1) + f.w_damping * b + f.w_potential;  // times x^(b-2)
    CHECK(lhs_v * std::pow(x, c - 2) == doctest::Approx(std::pow(x, e) * lhs_w * std::pow(x, b - 2)).epsilon(1e-10));
  }
}

TEST_CASE("polynomial round trip and invariants") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> L(-0.9, 4.0), M(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double ell = L(rng), mt = M(rng);
    auto m = ScaleInvariantModel::from_polynomial(ell, mt);
    CHECK(m.check().empty());
    CHECK(m.delta == compute_delta(m.alpha, m.mu));
    CHECK(m.equiv_poly->first / (m.equiv_poly->first + 1.0) == m.alpha);
    CHECK(m.equiv_poly->second / (m.equiv_poly->first + 1.0) == m.mu);
    CHECK(m.delta == doctest::Approx((1.0 - 4.0 * mt * mt) / ((ell + 1) * (ell + 1))).epsilon(1e-12));
    const auto [ell2, mt2] = polynomial_equivalent(m.alpha, m.mu);
    CHECK(ell2 == doctest::Approx(ell).epsilon(1e-13));
    CHECK(mt2 == doctest::Approx(mt).epsilon(1e-13));
    // A(t) = (1+t)^(ell+1)/(ell+1)
    const double t = 3.7;
    CHECK(m.A(t) == doctest::Approx(std::pow(1.0 + t, ell + 1.0) / (ell + 1.0)).epsilon(1e-12));
  }
  auto m = ScaleInvariantModel::from_polynomial(1.0, 0.3);
  m.delta = std::nextafter(m.delta, 1.0);
  CHECK_FALSE(m.check().empty());
}

TEST_CASE("profile matches the model relations") {
  for (auto m : {ScaleInvariantModel::from_alpha_mu(0.4, 0.3, 0.6),
                 ScaleInvariantModel::from_alpha_mu(1.0, 0.5),
                 ScaleInvariantModel::from_polynomial(2.0, 0.1)}) {
    auto p = m.profile();
    for (double t : {0.0, 0.5, 3.0, 20.0}) {
      const double A = m.A(t);
      CHECK(p.a1(t) / p.a(t) == doctest::Approx(m.alpha * p.a(t) / A).epsilon(1e-6));
      CHECK(p.m(t) == doctest::Approx(m.mu * p.a(t) / A).epsilon(1e-10));
    }
    CHECK(p.a(0.0) == doctest::Approx(1.0));
  }
}

TEST_CASE("rate predictions on the worked examples") {
  auto poly = ScaleInvariantModel::from_polynomial(1.0, 0.3);
  auto r = predict_rates(poly, 2.0, 0.0, 3);
  CHECK(r.potential.scale == RateScale::OnePlusT);
  CHECK(r.potential.power == doctest::Approx(1.8));
  CHECK(r.potential.log_power == 0.0);
  CHECK(r.kinetic.power == doctest::Approx(1.0));
  CHECK(r.lq_case.branch == LqBranch::L2);

  auto ex = predict_rates(ScaleInvariantModel::from_alpha_mu(1.0, 0.5), 2.0, 0.0, 2);
  CHECK(ex.kinetic.scale == RateScale::T);
  CHECK(ex.kinetic.power == doctest::Approx(1.0));
  CHECK(ex.potential.power == doctest::Approx(0.0));

  auto crit = predict_rates(ScaleInvariantModel::from_polynomial(1.0, 0.5), 2.0, 0.0, 1);
  CHECK(crit.potential.power == doctest::Approx(1.0));
  CHECK(crit.potential.log_power == 2.0);

  // delta >= 1 energy branch: -1 < ell < 0 with ell + 1 <= sqrt(1 - 4 mu~^2).
  const double ell = -0.5, mt = 0.2;
  auto neg = predict_rates(ScaleInvariantModel::from_polynomial(ell, mt), 2.0, 0.0, 1);
  CHECK(neg.kinetic.power == doctest::Approx(-1.0 + std::sqrt(1.0 - 4.0 * mt * mt)));
  CHECK(neg.potential.power == doctest::Approx(1.0 + std::sqrt(1.0 - 4.0 * mt * mt)));

  // Negative delta in polynomial form gives ||u||^2 <~ (1+t).
  auto osc = predict_rates(ScaleInvariantModel::from_polynomial(2.0, 0.8), 2.0, 0.0, 1);
  CHECK(osc.potential.power == doctest::Approx(1.0));
  CHECK(osc.kinetic.power == doctest::Approx(2.0));

  CHECK_THROWS_AS(predict_rates(poly, 0.5, 0.0, 1), DomainError);
  CHECK_THROWS_AS(predict_rates(poly, 1.5, 1.5, 1), DomainError);
  CHECK_THROWS_AS(predict_rates(poly, 1.5, 0.5, 0), DomainError);
}

TEST_CASE("potential exponent is continuous across delta = 0") {
  const double ell = 1.0;
  auto at0 = predict_rates(ScaleInvariantModel::from_polynomial(ell, 0.5), 2.0, 0.0, 1);
  for (double gap : {1e-4, 1e-8, 1e-12}) {
    auto above = predict_rates(ScaleInvariantModel::from_polynomial(ell, 0.5 - gap), 2.0, 0.0, 1);
    auto below = predict_rates(ScaleInvariantModel::from_polynomial(ell, 0.5 + gap), 2.0, 0.0, 1);
    CHECK(std::abs(above.potential.power - at0.potential.power) < 10.0 * std::sqrt(gap));
    CHECK(below.potential.power == doctest::Approx(at0.potential.power));
  }
}

TEST_CASE("Lq branch selection is total and exclusive") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> A(-0.5, 0.9), M(0.0, 0.6), Q(1.0, 2.0), K(0.0, 1.0);
  std::vector<double> qs;
  for (int i = 0; i < 400; ++i) qs.push_back(Q(rng));
  for (double q : {1.0, 4.0 / 3.0, 1.5, 1.6, 2.0}) qs.push_back(q);  // n = q/(2-q) hits 1, 2, 3, 4
  int seen[7] = {};
  for (double q : qs) {
    for (int n = 1; n <= 4; ++n) {
      auto m = ScaleInvariantModel::from_alpha_mu(A(rng), M(rng));
      if (n == 1 && q < 1.2) m = ScaleInvariantModel::from_alpha_mu(0.5, 0.25);  // delta = 0
      const double kappa = K(rng);
      auto r = predict_rates(m, q, kappa, n);
      int matches = 0;
      const double g = (2 - q) / q;
      auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, b); };
      const bool l2 = q == 2.0;
      const bool np = !l2 && m.delta <= 0;
      const bool pp = !l2 && m.delta > 0;
      const double nc = q / (2 - q);
      const double lhs = 1 + std::sqrt(std::max(m.delta, 0.0)), rhs = g * n + 2 * kappa;
      const bool cand[7] = {l2,
                            np && !close(n, nc) && n > nc,
                            np && close(n, nc),
                            np && !close(n, nc) && n < nc,
                            pp && !close(lhs, rhs) && lhs > rhs,
                            pp && close(lhs, rhs),
                            pp && !close(lhs, rhs) && lhs < rhs};
      for (int b = 0; b < 7; ++b) matches += cand[b];
      CHECK(matches == 1);
      CHECK(cand[static_cast<int>(r.lq_case.branch)]);
      ++seen[static_cast<int>(r.lq_case.branch)];
    }
  }
  for (int b : {0, 1, 2, 3, 4, 6}) CHECK(seen[b] > 0);
  // Critical line for delta > 0: 1 + sqrt(delta) = (2-q) n / q + 2 kappa.
  auto m = ScaleInvariantModel::from_alpha_mu(0.0, 0.0);  // delta = 1
  auto c = predict_rates(m, 1.0, 0.5, 1);                 // 2 = 1 + 1
  CHECK(c.lq_case.branch == LqBranch::PosCritical);
  CHECK(c.lq_case.rate.log_power == doctest::Approx(2.0));
}

TEST_CASE("Lq rates on sample cases") {
  // delta > 0 fast branch: exponent of ||u||_{H^kappa}^2 in A.
  auto m = ScaleInvariantModel::from_polynomial(1.0, 0.3);  // alpha 1/2, sqrt(delta) 0.4
  auto r = predict_rates(m, 1.0, 0.0, 1);
  REQUIRE(r.lq_case.branch == LqBranch::PosFast);
  CHECK(r.lq_case.rate.A_power == doctest::Approx(2 * (-0.5 + 0.45)));
  auto slow = predict_rates(m, 1.0, 1.0, 3);
  CHECK(slow.lq_case.branch == LqBranch::PosSlow);
  CHECK(slow.lq_case.rate.A_power == doctest::Approx(-0.5));
  // delta < 0, n = 1 = q/(2-q) at q = 1: d(t) = (ln A)^(1/2).
  auto e = predict_rates(ScaleInvariantModel::from_alpha_mu(1.0, 0.5), 1.0, 0.0, 1);
  CHECK(e.lq_case.branch == LqBranch::NonPosCritical);
  CHECK(e.lq_case.d_log_power == doctest::Approx(0.5));
  CHECK(e.lq_case.rate.log_power == doctest::Approx(1.0));
  CHECK(e.lq_case.rate.power == doctest::Approx(-1.0));
  auto nc = predict_rates(ScaleInvariantModel::from_alpha_mu(1.0, 0.5), 1.8, 0.0, 2);
  CHECK(nc.lq_case.branch == LqBranch::NotCovered);
  CHECK(to_json(nc)["lq_case"]["rate"]["power"].is_null());
}

TEST_CASE("transform consistency: original and dissipative integrations agree") {
  const std::vector<double> times{0.0, 0.7, 2.0, 5.0, 11.0};
  for (auto m : {ScaleInvariantModel::from_alpha_mu(1.0, 0.5),
                 ScaleInvariantModel::from_alpha_mu(0.4, 0.45, 0.5),
                 ScaleInvariantModel::from_polynomial(1.0, 0.3),
                 ScaleInvariantModel::from_polynomial(1.0, 0.5),
                 ScaleInvariantModel::from_polynomial(-0.5, 0.2),
                 ScaleInvariantModel::from_alpha_mu(0.0, 0.3)}) {
    auto p = m.profile();
    const bool exp_speed = m.alpha == 1.0;
    std::vector<double> ts = times;
    if (exp_speed) ts = {0.0, 0.7, 2.0, 4.0};
    for (double xi : {0.0, 0.3, 2.0}) {
      ModeOptions opt;
      opt.tol = 1e-12;
      opt.z_frame = false;
      const cplx u0(1.0, 0.2), u1(-0.4, 0.9);
      auto ref = integrate_mode_direct(p, xi, u0, u1, ts, opt);
      auto tr = integrate_transformed_mode(m, xi, u0, u1, ts, 1e-12);
      for (std::size_t k = 0; k < ts.size(); ++k) {
        const double scale = std::abs(ref.u[k]) + std::abs(ref.ut[k]);
        CHECK(std::abs(tr.u[k] - ref.u[k]) / scale < 1e-6);
        CHECK(std::abs(tr.ut[k] - ref.ut[k]) / scale < 1e-6);
      }
    }
  }
}

TEST_CASE("zero-frequency power solution oracle") {
  // For xi = 0 the model has u = (A/A0)^r with r a root of r^2 - (1-alpha) r + mu^2 = 0.
  auto m = ScaleInvariantModel::from_alpha_mu(0.3, 0.2, 0.5);
  const double r = ((1 - m.alpha) + std::sqrt(m.delta)) / 2;
  const std::vector<double> ts{0.0, 1.0, 10.0, 60.0};
  auto tr = integrate_transformed_mode(m, 0.0, 1.0, r / m.A0, ts);
  for (std::size_t k = 0; k < ts.size(); ++k) {
    CHECK(tr.u[k].real() == doctest::Approx(std::pow(m.A(ts[k]) / m.A0, r)).epsilon(1e-9));
  }
}

TEST_CASE("exponent fits and windows") {
  std::vector<double> t, y, z;
  for (int i = 0; i <= 100; ++i) {
    const double s = std::pow(10.0, 3.0 * i / 100.0) - 1.0;
    t.push_back(s);
    y.push_back(4.0 * std::pow(1 + s, 1.3));
    z.push_back(2.0 * std::pow(1 + s, 0.5) * std::pow(std::log(std::exp(1.0) + s), 2.0));
  }
  auto f = fit_exponent(t, y, RateScale::OnePlusT, 99.0, 999.0);
  CHECK(f.exponent == doctest::Approx(1.3));
  CHECK(f.rms < 1e-12);
  CHECK(fit_exponent(t, z, RateScale::OnePlusT, 99.0, 999.0, 2.0).exponent == doctest::Approx(0.5));
  auto m = ScaleInvariantModel::from_alpha_mu(1.0, 0.5);
  auto [lo, hi] = final_decade(m, RateScale::T, 12.0);
  CHECK(m.A(hi) / m.A(lo) == doctest::Approx(10.0));
}

TEST_CASE("verify_rates: free wave energy is flat") {
  auto m = ScaleInvariantModel::from_alpha_mu(0.0, 0.0);
  auto pred = predict_rates(m, 2.0, 0.0, 1);
  RateSimConfig cfg;
  cfg.horizon = 1e3;
  cfg.data = rate_probe_measure(m, cfg.horizon, 12);
  cfg.tolerance = 0.02;
  auto rep = verify_rates(m, pred, cfg);
  CHECK(rep.kinetic.status == FitStatus::Pass);
  CHECK(std::abs(rep.kinetic.fitted) < 0.02);
  CHECK(rep.potential.fitted == doctest::Approx(2.0).epsilon(0.025));

  cfg.horizon = 20.0;
  auto short_rep = verify_rates(m, pred, cfg);
  CHECK(short_rep.kinetic.status == FitStatus::Inconclusive);
  CHECK_FALSE(short_rep.passed());
}

TEST_CASE("verify_rates: polynomial and exponential speeds") {
  auto poly = ScaleInvariantModel::from_polynomial(1.0, 0.3);
  RateSimConfig cfg;
  cfg.horizon = 1e3;
  cfg.data = rate_probe_measure(poly, cfg.horizon, 16);
  auto rep = verify_rates(poly, predict_rates(poly, 2.0, 0.0, 1), cfg);
  CHECK(rep.potential.fitted == doctest::Approx(1.8).epsilon(0.05 / 1.8));
  CHECK(rep.potential.status == FitStatus::Pass);
  CHECK(rep.kinetic.status == FitStatus::Pass);

  auto ex = ScaleInvariantModel::from_alpha_mu(1.0, 0.5);
  RateSimConfig ce;
  ce.horizon = 12.0;
  ce.data = rate_probe_measure(ex, ce.horizon, 16);
  auto re = verify_rates(ex, predict_rates(ex, 2.0, 0.0, 1), ce);
  CHECK(re.kinetic.fitted == doctest::Approx(1.0).epsilon(0.05));
  CHECK(re.kinetic.status == FitStatus::Pass);
  CHECK(re.potential.status == FitStatus::Pass);

  // delta >= 1: the kinetic rate comes from the zero-frequency power solution.
  auto neg = ScaleInvariantModel::from_polynomial(-0.5, 0.2);
  RateSimConfig cn;
  cn.data = rate_probe_measure(neg, cn.horizon, 16);
  auto rn = verify_rates(neg, predict_rates(neg, 2.0, 0.0, 1), cn);
  CHECK(rn.kinetic.predicted == doctest::Approx(-1.0 + std::sqrt(0.84)));
  CHECK(rn.passed());
}
