#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "kgspec/classify.hpp"
#include "kgspec/lab.hpp"
#include "kgspec/modes.hpp"
#include "kgspec/scatter.hpp"
#include "kgspec/semilinear.hpp"

namespace kgspec {

namespace {

std::string g4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Profiles {
  std::string name;
  CoefficientProfile p;
  double T;
  Kind kind;
};

// The five canonical families of the classifier table.
std::vector<Profiles> canonical_families() {
  return {
      {"scattering power mass", CoefficientProfile(speed_constant(), mass_power(1.0, -2.0)), 1e6,
       Kind::Scattering},
      {"log mass", CoefficientProfile(speed_constant(), mass_log(0.5, 0.5)), 1e6,
       Kind::NonEffective},
      {"effective polynomial", CoefficientProfile(speed_polynomial(1.0), mass_power(1.0, 0.0)),
       1e6, Kind::Effective},
      {"effective exponential", CoefficientProfile(speed_exponential(), mass_power(1.0, 2.0)),
       200.0, Kind::Effective},
      {"grey exponential", CoefficientProfile(speed_exponential(), mass_constant(1.0)), 200.0,
       Kind::GreyZone},
  };
}

std::vector<double> times_to(double T, int samples) {
  auto g = geometric_grid(0.0, T, samples);
  g.insert(g.begin(), 0.0);
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

SpectralMeasure flat_measure(const Config& c, int count) {
  return gaussian_measure(c.num("xi_lo", 0.01), c.num("xi_hi", 10.0),
                          static_cast<int>(c.integer("xi_count", count)),
                          static_cast<int>(c.integer("n", 1)), 1e300);
}

CriterionResult c1(const Config& c, ExecutionPolicy pol) {
  CriterionResult r{1, "conservation for a = 1, m = 1", {}, {}};
  CoefficientProfile p(speed_constant(), mass_constant(1.0));
  auto m = flat_measure(c, 32);
  for (std::size_t i = 0; i < m.xi.size(); ++i) m.u1[i] = 0.5 * m.u0[i];
  ModeOptions mo;
  mo.tol = c.num("ode_tol", 1e-10);
  auto tr = sweep_modes(p, m, times_to(c.num("horizon", 100.0), 200), mo, pol);
  auto e = assemble_energies(tr, p, std::nullopt, m.weight);
  double dev = 0.0;
  for (double v : e.E_am) dev = std::max(dev, std::abs(v - e.E_am[0]) / e.E_am[0]);
  const double tol = c.num("conservation_tol", 1e-7);
  r.data["deviation"] = dev;
  r.checks.push_back({"relative deviation", dev <= tol, g4(dev) + " <= " + g4(tol)});
  return r;
}

CriterionResult c2(const Config&, ExecutionPolicy) {
  CriterionResult r{2, "classifier table", {}, nlohmann::json::array()};
  for (const auto& f : canonical_families()) {
    auto cl = classify(f.p, f.T);
    r.data.push_back({{"family", f.name}, {"kind", to_string(cl.kind)}});
    r.checks.push_back({f.name, cl.kind == f.kind,
                        to_string(cl.kind) + " (expected " + to_string(f.kind) + ")"});
  }
  return r;
}

// Shared run for the effective criteria: a = 1+t, m = 1.
struct EffectiveRun {
  EnergySeries e;
  std::vector<double> gamma, mass;
  double T;
};

EffectiveRun effective_run(const Config& c, ExecutionPolicy pol) {
  CoefficientProfile p(speed_polynomial(c.num("ell", 1.0)), mass_power(1.0, c.num("eps", 1.0) - 1.0));
  EffectiveRun run;
  run.T = c.num("horizon", 1e3);
  auto m = flat_measure(c, 64);
  ModeOptions mo;
  mo.tol = c.num("ode_tol", 1e-10);
  const auto times = times_to(run.T, static_cast<int>(c.integer("samples", 200)));
  auto tr = sweep_modes(p, m, times, mo, pol);
  run.e = assemble_energies(tr, p, std::nullopt, m.weight);
  for (double t : times) {
    run.mass.push_back(p.m(t));
    run.gamma.push_back(std::max(p.a(t), p.m(t)));
  }
  return run;
}

CriterionResult c3(const Config& c, ExecutionPolicy pol) {
  CriterionResult r{3, "effective energy growth", {}, {}};
  auto run = effective_run(c, pol);
  auto f = fit_rate(run.e.t, run.e.E_eff, FitModel::Power);
  const double lo = (1.0 + run.T) / 10.0 - 1.0;
  double mx = 0.0, mn = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < run.e.t.size(); ++i) {
    if (run.e.t[i] < lo) continue;
    const double q = run.e.E_eff[i] / run.gamma[i];
    mx = std::max(mx, q);
    mn = std::min(mn, q);
  }
  r.data["energy_fit"] = to_json(f);
  r.data["ratio_max_over_min"] = mx / mn;
  const double bound = 1.0 + c.num("rate_tol", 0.05);
  r.checks.push_back({"energy exponent",
                      f.status != FitStatus::Inconclusive && f.exponent <= bound,
                      g4(f.exponent) + " <= " + g4(bound)});
  const double rb = c.num("ratio_max", 10.0);
  r.checks.push_back({"E/gamma spread", mx / mn <= rb, g4(mx / mn) + " <= " + g4(rb)});
  return r;
}

CriterionResult c4(const Config& c, ExecutionPolicy pol) {
  CriterionResult r{4, "effective potential decay", {}, {}};
  auto run = effective_run(c, pol);
  auto fu = fit_rate(run.e.t, run.e.potential, FitModel::Power);
  auto fm = fit_rate(run.e.t, run.mass, FitModel::Power, std::numeric_limits<double>::quiet_NaN(),
                     0.05, {}, 1.0);
  r.data["potential_fit"] = to_json(fu);
  r.data["mass_fit"] = to_json(fm);
  const double bound = -fm.exponent + c.num("rate_tol", 0.05);
  r.checks.push_back({"potential exponent",
                      fu.status != FitStatus::Inconclusive && fu.exponent <= bound,
                      g4(fu.exponent) + " <= " + g4(bound) + " (m exponent " + g4(fm.exponent) + ")"});
  return r;
}

CriterionResult c5(const Config& c, ExecutionPolicy pol) {
  CriterionResult r{5, "scale-invariant rates, a = 1", {}, {}};
  auto m = ScaleInvariantModel::from_alpha_mu(c.num("alpha", 0.0), c.num("mu", 0.3));
  auto pred = predict_rates(m, 2.0, 0.0, 1);
  RateSimConfig sim;
  sim.horizon = c.num("horizon", 1e3);
  sim.tolerance = c.num("rate_tol", 0.05);
  sim.data = rate_probe_measure(m, sim.horizon);
  auto rep = verify_rates(m, pred, sim, pol);
  r.data = to_json(rep);
  for (const auto* rc : {&rep.potential, &rep.kinetic}) {
    r.checks.push_back({rc->quantity, rc->status == FitStatus::Pass,
                        "fitted " + g4(rc->fitted) + " vs " + g4(rc->predicted) + " (" +
                            to_string(rc->status) + ")"});
  }
  return r;
}

// Range of the two-sided ratio over a frequency grid and time pairs past theta.
std::pair<double, double> ratio_range(const CoefficientProfile& p, const std::vector<double>& xi,
                                      double width, int pairs, double tol, ExecutionPolicy pol) {
  ZoneGeometry g;
  std::vector<double> lo(xi.size()), hi(xi.size());
  for_each_index(static_cast<long>(xi.size()), pol, [&](long i) {
    const double th = separating_time(g, p, xi[i]);
    std::vector<double> ts;
    for (int k = 0; k <= 2 * pairs; ++k) ts.push_back(th + width * std::pow(k / (2.0 * pairs), 2.0));
    ModeOptions mo;
    mo.tol = tol;
    auto tr = integrate_mode(p, xi[i], cplx(1.0, 0.0), cplx(0.0, 1.0), ts, mo);
    double a = std::numeric_limits<double>::infinity(), b = 0.0;
    for (int k = 0; k < pairs; ++k) {
      const double v = two_sided_check(tr, k, 2 * pairs - k, p);
      a = std::min(a, v);
      b = std::max(b, v);
    }
    lo[i] = a;
    hi[i] = b;
  });
  return {*std::min_element(lo.begin(), lo.end()), *std::max_element(hi.begin(), hi.end())};
}

CriterionResult c6(const Config& c, ExecutionPolicy pol) {
  CriterionResult r{6, "two-sided hyperbolic estimate", {}, nlohmann::json::array()};
  const int nxi = static_cast<int>(c.integer("xi_count", 20));
  const int pairs = static_cast<int>(c.integer("pairs", 10));
  std::vector<double> xi(nxi);
  for (int i = 0; i < nxi; ++i) xi[i] = 0.1 * std::pow(100.0, i / (nxi - 1.0));
  const double tol = c.num("ode_tol", 1e-10);
  for (const auto& f : canonical_families()) {
    const bool expo = f.p.speed_name() == speed_exponential().name;
    const double width = expo ? c.num("width_exp", 6.0) : c.num("width", 200.0);
    auto [c1v, c2v] = ratio_range(f.p, xi, width, pairs, tol, pol);
    auto [d1v, d2v] = ratio_range(f.p, xi, width, pairs, 0.5 * tol, pol);
    r.data.push_back({{"family", f.name}, {"C1", c1v}, {"C2", c2v}, {"C1_half", d1v}, {"C2_half", d2v}});
    const bool ok = c2v / c1v <= c.num("spread_max", 100.0) && std::abs(d1v / c1v - 1.0) <= 0.1 &&
                    std::abs(d2v / c2v - 1.0) <= 0.1;
    r.checks.push_back({f.name, ok,
                        "[" + g4(c1v) + ", " + g4(c2v) + "], half tol [" + g4(d1v) + ", " + g4(d2v) + "]"});
  }
  return r;
}

CriterionResult c7(const Config& c, ExecutionPolicy) {
  CriterionResult r{7, "pseudo-zone boundedness", {}, {}};
  CoefficientProfile p(speed_constant(), mass_log(c.num("mu0", 0.5), c.num("gamma", 0.5)));
  auto psi = build_psi(p);
  ZoneGeometry g;
  double mx = 0.0, mn = std::numeric_limits<double>::infinity();
  for (double xi : {1e-1, 1e-2, 1e-3}) {
    const double th = separating_time(g, p, xi);
    auto st = pseudo_zone_fundamental(p, psi, xi, th, g);
    r.data["sup_norm_xi_" + g4(xi)] = st.sup_norm;
    mx = std::max(mx, st.sup_norm);
    mn = std::min(mn, st.sup_norm);
  }
  const double sb = c.num("spread_max", 3.0);
  r.checks.push_back({"spread across xi", std::isfinite(mx) && mx / mn <= sb,
                      "sup norms in [" + g4(mn) + ", " + g4(mx) + "], spread " + g4(mx / mn)});
  return r;
}

CriterionResult c8(const Config& c, ExecutionPolicy pol) {
  CriterionResult r{8, "scattering residual slope", {}, {}};
  CoefficientProfile p(speed_constant(), mass_power(1.0, -2.0));
  ScatterOptions o;
  o.test_mode = true;
  o.horizon = c.num("horizon", 1e4);
  auto w = wave_operator(p, c.num("xi", 1.0), 0.1, 1e-10, o);
  const double s = loglog_slope(w.t, w.multiplier_residual, 100.0, o.horizon);
  std::vector<double> probe;
  for (double t = 100.0; t <= 1000.0; t *= 1.1) probe.push_back(t);
  auto band = gaussian_measure(1.0, 2.0, 12, 1, 1e300);
  for (auto& v : band.u1) v = cplx(0.5, 0.0);
  auto curve = asymptotic_equivalence(p, band, 0.5, probe, 1e-10, o, pol);
  const double ds = loglog_slope(curve.t, curve.value, 100.0, 1000.0);
  r.data = {{"residual_slope", s}, {"discrepancy_slope", ds}};
  r.checks.push_back({"residual slope", std::abs(s + 2.0) <= 0.1, g4(s) + " vs -2 +- 0.1"});
  r.checks.push_back({"discrepancy slope", std::abs(ds - s) <= 0.2,
                      g4(ds) + " vs " + g4(s) + " +- 0.2"});
  return r;
}

CriterionResult c9(const Config&, ExecutionPolicy) {
  CriterionResult r{9, "Liouville determinant for a = e^t", {}, nlohmann::json::array()};
  CoefficientProfile p(speed_exponential(), mass_zero());
  const double xis[] = {0.5, 1.0, 2.0, 5.0, 0.7, 1.5, 3.0, 0.8, 1.2, 4.0};
  const double gaps[] = {0.5, 1.0, 2.0, 3.0, 5.0, 0.25, 4.0, 1.5, 2.5, 0.1};
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double s = std::log(10.0 / xis[k]) + 0.1 * k;
    const double t = s + gaps[k];
    auto f = free_wave_fundamental(p, s, {t}, xis[k]);
    const double q = std::abs(f.value[0].determinant()) / (p.a(t) / p.a(s));
    worst = std::max(worst, std::abs(q - 1.0));
    r.data.push_back({{"s", s}, {"t", t}, {"xi", xis[k]}, {"ratio", q}});
  }
  r.checks.push_back({"determinant ratio", worst <= 1e-6, "max |ratio - 1| = " + g4(worst)});
  return r;
}

CriterionResult c10(const Config& c, ExecutionPolicy) {
  CriterionResult r{10, "Peano-Baker truncation at K = 8", {}, nlohmann::json::array()};
  const int K = static_cast<int>(c.integer("K", 8));
  const double tol = c.num("match_tol", 1e-10);
  struct Case {
    std::string name;
    std::function<double(double)> f;
    double t, integral;
  };
  std::vector<Case> cases{
      {"p0 = 0.1", [](double) { return 0.1; }, 1.0, 0.1},
      {"p0 = 0.5", [](double) { return 0.5; }, 1.0, 0.5},
      {"0.2 cos 3t", [](double t) { return 0.2 * std::cos(3.0 * t); }, 1.0, 0.2 * std::sin(3.0) / 3.0},
  };
  for (const auto& cs : cases) {
    auto pb = peano_baker([&](double t) { return Mat2c(cs.f(t) * Mat2c::Identity()); }, 0.0, cs.t, K);
    const double err = std::max(std::abs(pb.Q(0, 0) - std::polar(1.0, cs.integral)),
                                std::abs(pb.Q(1, 1) - std::polar(1.0, cs.integral)));
    r.data.push_back({{"case", cs.name}, {"error", err}, {"bound", pb.bound}, {"rounding", pb.rounding}});
    r.checks.push_back({cs.name + " match", err <= tol, "error " + g4(err) + " <= " + g4(tol)});
    r.checks.push_back({cs.name + " bound", pb.bound + pb.rounding >= err,
                        g4(pb.bound) + " + rounding >= error"});
  }
  return r;
}

CriterionResult c11(const Config& c, ExecutionPolicy pol) {
  CriterionResult r{11, "propagator estimate constants", {}, {}};
  const int nx = static_cast<int>(c.integer("xi_count", 240));
  const std::vector<double> s_grid{0.0, 1.0, 2.0}, t_grid{0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  auto a = check_kernel_bounds(1.0, s_grid, t_grid, 1.0, 2, nx, 1.0, pol);
  auto b = check_kernel_bounds(1.0, s_grid, t_grid, 1.0, 2, 2 * nx, 1.0, pol);
  r.data["n2"] = {{"sup_l2", a.sup_l2}, {"sup_l2_doubled", b.sup_l2},
                  {"sup_energy", a.sup_energy}, {"sup_energy_doubled", b.sup_energy}};
  const bool stable = std::isfinite(a.sup_l2) && std::isfinite(a.sup_energy) &&
                      std::abs(b.sup_l2 / a.sup_l2 - 1.0) <= 0.1 &&
                      std::abs(b.sup_energy / a.sup_energy - 1.0) <= 0.1;
  r.checks.push_back({"n = 2 sup stable", stable,
                      "l2 " + g4(a.sup_l2) + " -> " + g4(b.sup_l2) + ", energy " +
                          g4(a.sup_energy) + " -> " + g4(b.sup_energy)});

  auto one = check_kernel_bounds(1.0, {0.0}, {1.0, 2.0, 4.0, 6.0, 8.0}, 1.0, 1, nx, 1.0, pol);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : one.rows)
    rows.push_back({{"t", row.t}, {"with_d", row.l2_ratio()}, {"without_d", row.l2_ratio_without_d()}});
  r.data["n1"] = rows;
  const auto& f = one.rows.front();
  const auto& l = one.rows.back();
  const double grow = l.l2_ratio_without_d() / f.l2_ratio_without_d();
  double wmax = 0.0, wmin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < one.rows.size(); ++k) {
    wmax = std::max(wmax, one.rows[k].l2_ratio());
    wmin = std::min(wmin, one.rows[k].l2_ratio());
  }
  bool monotone = true;
  for (std::size_t k = 1; k < one.rows.size(); ++k)
    monotone = monotone && one.rows[k].l2_ratio_without_d() > one.rows[k - 1].l2_ratio_without_d();
  r.checks.push_back({"n = 1 without d grows", monotone && grow >= 1.5,
                      std::string(monotone ? "increasing" : "not increasing") + ", factor " + g4(grow) +
                          " over t - s in [1, 8]"});
  r.checks.push_back({"n = 1 with d bounded", wmax <= 1.5 * wmin,
                      "ratio in [" + g4(wmin) + ", " + g4(wmax) + "] for t - s >= 2"});
  return r;
}

CriterionResult c12(const Config& c, ExecutionPolicy pol) {
  CriterionResult r{12, "semilinear decay", {}, {}};
  const int M = static_cast<int>(c.integer("M", 256));
  const Grid g = resolving_grid(2, M, c.num("sigma", 45.0));
  auto data = gaussian_data(g, c.num("sigma", 45.0), 1.0, 0.5);
  scale_to_d1(data, c.num("eps", 1e-3));
  SemilinearOptions o;
  o.horizon = c.num("horizon", 8.0);
  o.gn_times = {1.0, 0.5 * o.horizon, o.horizon};
  auto res = solve_semilinear(data, o, pol);
  auto f = fit_rate(res.t, res.u_l2, FitModel::Exp, -0.5, 0.05,
                    std::make_pair(o.horizon - std::log(10.0), o.horizon));
  const double s1 = res.ledger.sup_until(1.0), sup = res.ledger.sup();
  r.data = {{"decay_fit", to_json(f)}, {"ledger_sup", sup}, {"ledger_t1", s1},
            {"picard_residual", res.picard_residual}, {"steps", res.steps}};
  r.checks.push_back({"decay exponent", f.pass(),
                      g4(f.exponent) + " vs -0.5 +- 0.05, rms " + g4(f.residual) + " <= " + g4(f.gate)});
  r.checks.push_back({"X-norm ledger", sup <= 10.0 * s1, g4(sup) + " <= 10 x " + g4(s1)});
  r.checks.push_back({"Picard residual", res.picard_residual <= o.tol,
                      g4(res.picard_residual) + " <= " + g4(o.tol)});
  return r;
}

CriterionResult c13(const Config&, ExecutionPolicy pol) {
  return {13, "property suites", property_checks(pol), {}};
}

}  // namespace

bool CriterionResult::passed() const {
  if (checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string CriterionResult::line() const {
  std::string s = "criterion " + std::to_string(id) + " " + (passed() ? "PASS" : "FAIL") + " " + title + ":";
  for (std::size_t i = 0; i < checks.size(); ++i) {
    s += (i ? "; " : " ") + checks[i].name + (checks[i].passed ? "" : " [failed]") + " " + checks[i].detail;
  }
  return s;
}

int criterion_count() { return 13; }

CriterionResult run_criterion(int id, const Config& params, ExecutionPolicy policy) {
  using Fn = CriterionResult (*)(const Config&, ExecutionPolicy);
  static const Fn table[] = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12, c13};
  if (id < 1 || id > criterion_count())
    throw DomainError("criterion must be in 1.." + std::to_string(criterion_count()));
  try {
    return table[id - 1](params, policy);
  } catch (const std::exception& e) {
    CriterionResult r{id, "criterion " + std::to_string(id), {}, {}};
    r.checks.push_back({"completed", false, e.what()});
    return r;
  }
}

std::vector<Check> property_checks(ExecutionPolicy policy) {
  std::vector<Check> out;

  // Wronskian of the kernel pair is 1.
  double wr = 0.0;
  for (double xi : {0.0, 0.3, 2.0}) {
    for (double t : {0.5, 2.0, 4.0}) {
      auto k = linear_kernels(1.0, 0.0, t, xi);
      wr = std::max(wr, std::abs(k.K0 * k.K1_t - k.K1 * k.K0_t - 1.0));
    }
  }
  out.push_back({"Wronskian", wr <= 1e-8, "max defect " + g4(wr)});

  // dE/dt = (a a' xi^2 + m m') |u|^2 by Simpson on a uniform sampling.
  {
    CoefficientProfile p(speed_polynomial(1.0), mass_power(1.0, 0.5));
    const int n = 2000;
    const double T = 10.0, h = T / n, xi = 0.7;
    std::vector<double> ts(n + 1);
    for (int i = 0; i <= n; ++i) ts[i] = i * h;
    ModeOptions mo;
    mo.tol = 1e-12;
    auto tr = integrate_mode_direct(p, xi, cplx(1.0, 0.3), cplx(-0.2, 0.5), ts, mo);
    auto E = [&](int i) {
      const double t = ts[i];
      return 0.5 * (std::norm(tr.ut[i]) + (p.a(t) * p.a(t) * xi * xi + p.m(t) * p.m(t)) * std::norm(tr.u[i]));
    };
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double t = ts[i];
      const double g = (p.a(t) * p.a1(t) * xi * xi + p.m(t) * p.m1(t)) * std::norm(tr.u[i]);
      s += (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0)) * g;
    }
    const double lhs = E(n) - E(0), rhs = s * h / 3.0;
    const double rel = std::abs(lhs - rhs) / std::abs(rhs);
    out.push_back({"energy identity", rel <= 1e-7, "relative defect " + g4(rel)});
  }

  // Linearity in the data.
  {
    CoefficientProfile p(speed_exponential(), mass_constant(1.0));
    const std::vector<double> ts{1.0, 5.0, 12.0};
    const cplx k(0.3, -2.0);
    auto a = integrate_mode(p, 0.4, 1.0, 0.5, ts);
    auto b = integrate_mode(p, 0.4, k, 0.5 * k, ts);
    double d = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i)
      d = std::max(d, std::abs(b.u[i] - k * a.u[i]) / std::abs(k * a.u[i]));
    out.push_back({"homogeneity", d <= 1e-8, "relative defect " + g4(d)});
  }

  // (ell, mu~) -> (alpha, mu) -> (ell, mu~), and transformed vs direct modes.
  {
    double d = 0.0;
    for (double ell : {-0.5, 0.0, 1.0, 3.0}) {
      for (double mt : {0.0, 0.2, 0.7}) {
        auto m = ScaleInvariantModel::from_polynomial(ell, mt);
        auto [e2, m2] = polynomial_equivalent(m.alpha, m.mu);
        d = std::max({d, std::abs(e2 - ell), std::abs(m2 - mt)});
      }
    }
    auto m = ScaleInvariantModel::from_alpha_mu(0.4, 0.3, 0.6);
    const std::vector<double> ts{0.5, 3.0, 10.0};
    auto tw = integrate_transformed_mode(m, 0.8, cplx(1.0, 0.0), cplx(0.2, 0.1), ts, 1e-12);
    ModeOptions mo;
    mo.tol = 1e-12;
    auto td = integrate_mode_direct(m.profile(), 0.8, cplx(1.0, 0.0), cplx(0.2, 0.1), ts, mo);
    double dm = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i)
      dm = std::max(dm, std::abs(tw.u[i] - td.u[i]) / std::abs(td.u[i]));
    out.push_back({"transform round trips", d <= 1e-12 && dm <= 1e-7,
                   "parameters " + g4(d) + ", modes " + g4(dm)});
  }

  // Parseval on a deterministic field.
  {
    Grid g{2, 32, 5.0};
    SpectralField f(g);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.37 * i) + std::cos(1.3 * i * i);
    auto c = f.analyze(v);
    const double d = std::abs(f.l2(c) - f.l2_grid(f.synthesize(c))) / f.l2(c);
    out.push_back({"Parseval", d <= 1e-10, "relative defect " + g4(d)});
  }

  // Two runs of the same config give byte-identical summaries.
  {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "kgspec-determinism";
    auto cfg = Config::parse(
        "pipeline = simulate\nname = det\nspeed = polynomial\nell = 1\nmass = constant\n"
        "mu0 = 1\nhorizon = 50\nxi_count = 8\nsamples = 40\nout = " + root.string() + "\n");
    std::string first;
    bool same = true;
    for (auto pol : {policy, ExecutionPolicy::Serial}) {
      run_experiment(ExperimentConfig::from_config(cfg), pol);
      std::ifstream in(root / "det" / "summary.json");
      std::stringstream ss;
      ss << in.rdbuf();
      if (first.empty()) first = ss.str();
      else same = same && first == ss.str();
    }
    std::error_code ec;
    fs::remove_all(root, ec);
    out.push_back({"summary determinism", same && !first.empty(), same ? "identical" : "differ"});
  }
  return out;
}

}  // namespace kgspec
