#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kgspec/semilinear.hpp"

using namespace kgspec;

namespace {

// Classical RK4 for u'' + (e^(2t) xi^2 + m^2) u = 0, an oracle independent of the mode solver.
std::array<double, 4> rk4_kernels(double m, double s, double t, double xi, int steps) {
  auto w2 = [&](double tt) { return std::exp(2.0 * tt) * xi * xi + m * m; };
  std::array<double, 4> out{};
  for (int col = 0; col < 2; ++col) {
    double u = col == 0 ? 1.0 : 0.0, v = col == 0 ? 0.0 : 1.0;
    const double h = (t - s) / steps;
    for (int k = 0; k < steps; ++k) {
      const double tt = s + k * h;
      const double k1u = v, k1v = -w2(tt) * u;
      const double k2u = v + 0.5 * h * k1v, k2v = -w2(tt + 0.5 * h) * (u + 0.5 * h * k1u);
      const double k3u = v + 0.5 * h * k2v, k3v = -w2(tt + 0.5 * h) * (u + 0.5 * h * k2u);
      const double k4u = v + h * k3v, k4v = -w2(tt + h) * (u + h * k3u);
      u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
      v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    }
    out[2 * col] = u;
    out[2 * col + 1] = v;
  }
  return out;  // K0, K0_t, K1, K1_t
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("spectral field: Parseval and conjugate symmetry") {
  std::mt19937 rng(7);
  std::normal_distribution<double> nd;
  for (int n : {1, 2, 3}) {
    Grid g{n, n == 3 ? 16 : 32, 5.0};
    SpectralField f(g);
    std::vector<double> v(g.size());
    for (auto& x : v) x = nd(rng);
    auto c = f.analyze(v);
    CHECK(f.symmetry_defect(c) < 1e-14);
    auto band = f.synthesize(c);
    CHECK(rel(f.l2(c), f.l2_grid(band)) < 1e-10);
    auto fine = f.synthesize_padded(c, 2 * g.M);
    CHECK(rel(f.l2(c), f.l2_grid(fine, 2 * g.M)) < 1e-10);
    double tail = 1.0;
    auto back = f.analyze_padded(fine, 2 * g.M, &tail);
    CHECK(tail < 1e-20);
    double worst = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) worst = std::max(worst, std::abs(back[i] - c[i]));
    CHECK(worst < 1e-14);
  }
  CHECK(sphere_area(2) == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(sphere_area(3) == doctest::Approx(4.0 * std::numbers::pi));
  CHECK_THROWS_AS(SpectralField(Grid{2, 15, 1.0}), DomainError);
}

TEST_CASE("gradient norm of a single mode") {
  Grid g{2, 16, 2.0 * std::numbers::pi};
  SpectralField f(g);
  std::vector<double> v(g.size());
  for (long i = 0; i < g.size(); ++i) {
    auto x = f.point(i);
    v[i] = std::cos(3.0 * x[0] + 2.0 * x[1]);
  }
  auto c = f.analyze(v);
  CHECK(f.l2(c) == doctest::Approx(std::sqrt(0.5 * g.volume())).epsilon(1e-12));
  CHECK(f.grad_l2(c) == doctest::Approx(std::sqrt(13.0 * 0.5 * g.volume())).epsilon(1e-12));
}

TEST_CASE("linear kernels: closed forms and an RK4 oracle") {
  clear_kernel_cache();
  const double m = 1.3;
  for (double s : {0.0, 0.7}) {
    for (double dt : {0.5, 2.0}) {
      auto k = linear_kernels(m, s, s + dt, 0.0);
      CHECK(k.K0 == doctest::Approx(std::cos(m * dt)).epsilon(1e-9));
      CHECK(k.K1 == doctest::Approx(std::sin(m * dt) / m).epsilon(1e-9));
      CHECK(k.K1_t == doctest::Approx(std::cos(m * dt)).epsilon(1e-9));
    }
  }
  auto id = linear_kernels(m, 1.0, 1.0, 0.4);
  CHECK(id.K0 == 1.0);
  CHECK(id.K1 == 0.0);
  CHECK(id.K1_t == 1.0);
  CHECK(id.K0_t == 0.0);
  for (double xi : {0.05, 0.3, 1.0}) {
    for (double s : {0.0, 0.5, 1.5}) {
      const double t = s + 1.2;
      auto k = linear_kernels(m, s, t, xi);
      auto o = rk4_kernels(m, s, t, xi, 20000);
      const double sc = std::sqrt(std::exp(2.0 * t) * xi * xi + m * m);
      CHECK(std::abs(k.K0 - o[0]) < 1e-8);
      CHECK(std::abs(k.K0_t - o[1]) < 1e-8 * sc);
      CHECK(std::abs(k.K1 - o[2]) < 1e-8);
      CHECK(std::abs(k.K1_t - o[3]) < 1e-8 * sc);
    }
  }
  CHECK(kernel_cache_size() > 0);
  CHECK_THROWS_AS(linear_kernels(m, 1.0, 0.5, 0.1), DomainError);
}

TEST_CASE("kernel Wronskian is one") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const double s = 2.0 * U(rng), t = s + 3.0 * U(rng), xi = 0.5 * U(rng), m = 0.2 + U(rng);
    auto k = linear_kernels(m, s, t, xi);
    CHECK(k.K0 * k.K1_t - k.K1 * k.K0_t == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("Magnus step propagator matches the kernels") {
  double worst = 0.0;
  for (double k : {0.0, 0.01, 0.05, 0.2}) {
    for (double t : {0.0, 2.0, 5.0, 7.5}) {
      for (double h : {0.05, 0.01, 0.001}) {
        const double wc = std::sqrt(std::exp(2.0 * t) * 0.04 + 1.0);
        if (h > 0.3 / wc) continue;
        Mat2 P = step_propagator(1.0, k * k, t, h, 0.05);
        auto kv = linear_kernels(1.0, t, t + h, k);
        const double w = std::sqrt(std::exp(2.0 * (t + h)) * k * k + 1.0);
        worst = std::max({worst, std::abs(P(0, 0) - kv.K0), std::abs(P(0, 1) - kv.K1),
                          std::abs(P(1, 0) - kv.K0_t) / w, std::abs(P(1, 1) - kv.K1_t)});
      }
    }
  }
  CHECK(worst < 1e-8);
  CHECK(step_propagator(1.0, 0.3, 1.0, 0.0) == Mat2::Identity());
}

TEST_CASE("propagator estimates on R^n") {
  std::vector<double> s_grid{0.0, 1.0, 2.0}, t_grid{0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  SUBCASE("n = 2, q = 1") {
    auto r = check_kernel_bounds(1.0, s_grid, t_grid, 1.0, 2, 240);
    CHECK_FALSE(r.critical);
    CHECK(std::isfinite(r.sup_energy));
    CHECK(r.sup_energy < 5.0);
    CHECK(r.sup_l2 < 5.0);
    CHECK(r.rows.size() == 7 + 5 + 4);
  }
  SUBCASE("n = 1, q = 1 carries (t-s)^(1/2)") {
    auto r = check_kernel_bounds(1.0, {0.0}, {1.0, 2.0, 4.0, 6.0, 8.0}, 1.0, 1, 240);
    CHECK(r.critical);
    const auto& first = r.rows.front();
    const auto& last = r.rows.back();
    CHECK(last.d == doctest::Approx(std::sqrt(8.0)));
    CHECK(last.l2_ratio_without_d() > 1.5 * first.l2_ratio_without_d());
    CHECK(last.l2_ratio() < 1.2 * r.rows[2].l2_ratio());
    CHECK(r.sup_l2 < 5.0);
  }
  CHECK(d_kernel(2, 1.0, 3.0, 1.0) == 1.0);
  CHECK(d_kernel(1, 1.0, 5.0, 1.0) == doctest::Approx(2.0));
  CHECK(d_kernel(3, 1.5, 9.0, 1.0) == doctest::Approx(std::pow(8.0, 1.0 / 6.0)));
  CHECK_THROWS_AS(check_kernel_bounds(1.0, {0.0}, {1.0}, 2.0, 1), DomainError);
}

TEST_CASE("D1 norm of a Gaussian") {
  const double sigma = 2.0;
  Grid g{1, 256, 60.0};
  auto f = gaussian_data(g, sigma, 1.0, 0.0);
  const double l1 = sigma * std::sqrt(2.0 * std::numbers::pi);
  const double l2sq = sigma * std::sqrt(std::numbers::pi);
  const double gradsq = std::sqrt(std::numbers::pi) / (2.0 * sigma);
  CHECK(d1_norm(f) == doctest::Approx(std::sqrt(l1 * l1 + l2sq + gradsq)).epsilon(1e-10));
  scale_to_d1(f, 1e-3);
  CHECK(d1_norm(f) == doctest::Approx(1e-3).epsilon(1e-12));
  auto z = gaussian_data(g, sigma, 0.0, 0.0);
  CHECK_THROWS_AS(scale_to_d1(z, 1.0), DomainError);
  auto mf = gaussian_data(g, sigma, 1.0, 1.0, true);
  CHECK(std::abs(mf.coeffs[0]) == 0.0);
}

TEST_CASE("X-norm ledger keeps a running sup") {
  XNormLedger L;
  L.add(0.0, 1.0);
  L.add(0.5, 3.0);
  L.add(1.0, 2.0);
  L.add(2.0, 2.5);
  CHECK(L.sup() == 3.0);
  CHECK(L.sup_until(0.2) == 1.0);
  CHECK(L.sup_until(1.5) == 3.0);
  for (std::size_t i = 1; i < L.sup_so_far.size(); ++i)
    CHECK(L.sup_so_far[i] >= L.sup_so_far[i - 1]);
  CHECK(d_xnorm(1, 4.0) == 2.0);
  CHECK(d_xnorm(1, 0.25) == 1.0);
  CHECK(d_xnorm(2, 9.0) == 1.0);
}

TEST_CASE("semilinear: zero data stays zero") {
  auto f = gaussian_data(resolving_grid(2, 32, 4.0), 4.0, 0.0, 0.0);
  SemilinearOptions o;
  o.horizon = 1.0;
  auto r = solve_semilinear(f, o);
  for (auto c : r.final_state.coeffs) CHECK(c == cplx(0.0, 0.0));
  CHECK(r.ledger.sup() == 0.0);
}

TEST_CASE("semilinear: linear limit and bounded weighted norm") {
  auto f = gaussian_data(resolving_grid(2, 64, 4.0), 4.0, 1.0, 0.5, true);
  scale_to_d1(f, 1e-8);
  SemilinearOptions o;
  o.horizon = 5.0;
  o.nonlinear = false;
  auto lin = solve_semilinear(f, o);
  o.nonlinear = true;
  auto nl = solve_semilinear(f, o);
  const double diff = std::abs(nl.u_l2.back() - lin.u_l2.back()) / lin.u_l2.back();
  CHECK(diff < 1e-6);
  CHECK(lin.decay_bounds_ok());
  CHECK(lin.ledger.sup() <= 10.0 * lin.ledger.sup_until(1.0));
  CHECK(nl.picard_residual <= o.tol);
  CHECK(nl.final_state.symmetry_defect(nl.final_state.coeffs) < 1e-12);
}

TEST_CASE("semilinear: step count doubles the accuracy check") {
  // Halving the phase budget changes the result far below the decay itself.
  Grid g{1, 128, 120.0};
  auto f = gaussian_data(g, 3.0, 1.0, 0.0);
  scale_to_d1(f, 1e-2);
  SemilinearOptions o;
  o.horizon = 3.0;
  auto a = solve_semilinear(f, o);
  o.step_phase *= 0.5;
  o.max_step *= 0.5;
  auto b = solve_semilinear(f, o);
  CHECK(rel(a.u_l2.back(), b.u_l2.back()) < 1e-6);
  CHECK(b.steps > a.steps);
}

TEST_CASE("semilinear: resolution independence") {
  auto run = [](int M) {
    Grid g{1, M, 150.0};
    auto f = gaussian_data(g, 3.0, 1.0, 0.5);
    scale_to_d1(f, 1e-2);
    SemilinearOptions o;
    o.horizon = 3.0;
    o.max_step = 0.02;
    o.step_phase = 0.1;
    return solve_semilinear(f, o);
  };
  auto a = run(128), b = run(256);
  CHECK(rel(a.u_l2.back(), b.u_l2.back()) < 1e-6);
  CHECK(rel(a.grad_l2.back(), b.grad_l2.back()) < 1e-6);
}

TEST_CASE("semilinear: n = 1 with p = 2 and p = 3") {
  // |u|^3 is only C^2 where u changes sign, so p = 3 needs the finer grid.
  for (double p : {2.0, 3.0}) {
    const int M = p == 2.0 ? 256 : 512;
    auto f = gaussian_data(Grid{1, M, resolving_grid(1, 256, 10.0).L}, 10.0, 1.0, 0.5);
    scale_to_d1(f, 1e-3);
    SemilinearOptions o;
    o.p = p;
    o.horizon = 4.0;
    o.gn_times = {1.0, 4.0};
    auto r = solve_semilinear(f, o);
    CHECK(r.padded_M >= static_cast<int>((p / 2 + 1) * M));
    CHECK(r.decay_bounds_ok());
    CHECK(r.gn_ok());
    CHECK(r.gn.size() == 4);
    CHECK(r.picard_residual <= o.tol);
  }
}

TEST_CASE("semilinear: serial and parallel agree bitwise") {
  auto f = gaussian_data(resolving_grid(2, 32, 4.0), 4.0, 1.0, 0.5);
  scale_to_d1(f, 1e-3);
  SemilinearOptions o;
  o.horizon = 1.5;
  auto a = solve_semilinear(f, o, ExecutionPolicy::Serial);
  auto b = solve_semilinear(f, o, ExecutionPolicy::Parallel);
  CHECK(a.u_l2 == b.u_l2);
  CHECK(a.final_state.coeffs == b.final_state.coeffs);
}

TEST_CASE("semilinear: preconditions and large data") {
  auto f = gaussian_data(resolving_grid(2, 32, 4.0), 4.0, 1.0, 0.0);
  SemilinearOptions o;
  o.p = 1.5;
  CHECK_THROWS_AS(solve_semilinear(f, o), DomainError);
  auto f3 = gaussian_data(resolving_grid(3, 8, 4.0), 4.0, 1.0, 0.0);
  o.p = 4.0;
  CHECK_THROWS_AS(solve_semilinear(f3, o), DomainError);
  o.p = 2.0;
  o.horizon = 4.0;
  scale_to_d1(f, 1e4);
  CHECK_THROWS_AS(solve_semilinear(f, o), NumericalError);
}
