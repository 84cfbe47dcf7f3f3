#include "kgspec/scaleinv.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "kgspec/ode.hpp"

namespace kgspec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool near(double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y)); }

// a = (A / A0)^alpha as a function of x = 1 + tau = A.
double speed_at(const ScaleInvariantModel& m, double x) { return std::pow(x / m.A0, m.alpha); }

nlohmann::json rate_json(const RateExponent& r) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  return {{"A_power", num(r.A_power)},
          {"log_power", r.log_power},
          {"scale", to_string(r.scale)},
          {"power", num(r.power)}};
}

}  // namespace

double compute_delta(double alpha, double mu) {
  return (alpha - 1.0) * (alpha - 1.0) - 4.0 * mu * mu;
}

std::pair<double, double> polynomial_equivalent(double alpha, double mu) {
  if (!(alpha < 1.0)) throw DomainError("polynomial form needs alpha < 1");
  const double ell = alpha / (1.0 - alpha);
  return {ell, mu * (ell + 1.0)};
}

ScaleInvariantModel ScaleInvariantModel::from_alpha_mu(double alpha, double mu, double A0) {
  ScaleInvariantModel m;
  m.alpha = alpha;
  m.mu = mu;
  m.A0 = A0;
  m.delta = compute_delta(alpha, mu);
  if (auto bad = m.check(); !bad.empty()) throw DomainError(bad.front());
  return m;
}

ScaleInvariantModel ScaleInvariantModel::from_polynomial(double ell, double mu_tilde) {
  if (!(ell > -1.0)) throw DomainError("polynomial speed needs ell > -1");
  if (!(mu_tilde >= 0.0)) throw DomainError("mu~ must be nonnegative");
  ScaleInvariantModel m;
  m.alpha = ell / (ell + 1.0);
  m.mu = mu_tilde / (ell + 1.0);
  m.A0 = 1.0 / (ell + 1.0);
  m.delta = compute_delta(m.alpha, m.mu);
  m.equiv_poly = std::make_pair(ell, mu_tilde);
  return m;
}

double ScaleInvariantModel::sigma() const {
  if (delta < 0.0) return (1.0 - delta) / 4.0;
  return (1.0 - alpha) / 2.0 + std::sqrt(delta) / 2.0;
}

std::vector<std::string> ScaleInvariantModel::check() const {
  std::vector<std::string> out;
  if (!std::isfinite(alpha) || !std::isfinite(mu)) out.push_back("alpha and mu must be finite");
  if (alpha > 1.0) out.push_back("alpha > 1: A blows up in finite time");
  if (mu < 0.0) out.push_back("mu must be nonnegative");
  if (!(A0 > 0.0)) out.push_back("A0 must be positive");
  // Polynomial speeds with ell < 0 have A0 = 1/(ell+1) > 1; the transform still applies.
  if (A0 > 1.0 && !equiv_poly) out.push_back("A0 must lie in (0, 1]");
  if (delta != compute_delta(alpha, mu)) out.push_back("stored delta does not match (alpha, mu)");
  if (equiv_poly) {
    const auto [ell, mt] = *equiv_poly;
    if (ell / (ell + 1.0) != alpha || mt / (ell + 1.0) != mu) {
      out.push_back("equiv_poly does not round-trip to (alpha, mu)");
    }
  }
  return out;
}

CoefficientProfile ScaleInvariantModel::profile() const {
  std::ostringstream label;
  if (equiv_poly) {
    label << "poly(ell=" << equiv_poly->first << ", mu~=" << equiv_poly->second << ")";
    return CoefficientProfile(speed_polynomial(equiv_poly->first),
                              mass_power(equiv_poly->second, -1.0), label.str());
  }
  label << "scale_invariant(alpha=" << alpha << ", mu=" << mu << ", A0=" << A0 << ")";
  return CoefficientProfile(speed_scale_invariant(alpha, A0), mass_scale_invariant(mu),
                            label.str());
}

double ScaleInvariantModel::A(double t) const {
  if (alpha == 1.0) return A0 * std::exp(t / A0);
  return A0 * std::pow(1.0 + (1.0 - alpha) * t / A0, 1.0 / (1.0 - alpha));
}

DissipativeForm transform_to_dissipative(const ScaleInvariantModel& m) {
  if (auto bad = m.check(); !bad.empty()) throw DomainError(bad.front());
  DissipativeForm f;
  f.damping = m.alpha;
  f.potential = m.mu * m.mu;
  f.tau0 = m.A0 - 1.0;
  f.sigma = m.sigma();
  if (m.delta < 0.0) {
    f.potential_branch = true;
    f.w_exponent = -m.alpha / 2.0;
    f.w_potential = (1.0 - m.delta) / 4.0;
  } else {
    f.w_exponent = f.sigma;
    f.w_damping = 1.0 + std::sqrt(m.delta);
  }
  return f;
}

nlohmann::json to_json(const DissipativeForm& f) {
  return {{"damping", f.damping},         {"potential", f.potential},
          {"tau0", f.tau0},               {"branch", f.potential_branch ? "potential" : "damping"},
          {"w_exponent", f.w_exponent},   {"sigma", f.sigma},
          {"w_damping", f.w_damping},     {"w_potential", f.w_potential}};
}

std::pair<cplx, cplx> transformed_data(const ScaleInvariantModel& m, const DissipativeForm& f,
                                       cplx u0, cplx u1) {
  const double x0 = 1.0 + f.tau0;
  const double a0 = speed_at(m, x0);
  const cplx v0 = u0, v1 = u1 / a0;  // d/dtau = a^-1 d/dt
  const double e = f.w_exponent;     // w = x^-e v
  const double s = std::pow(x0, -e);
  return {s * v0, s * v1 - e * s / x0 * v0};
}

ModeTrajectory integrate_transformed_mode(const ScaleInvariantModel& m, double xi, cplx u0,
                                          cplx u1, const std::vector<double>& times, double tol) {
  const DissipativeForm f = transform_to_dissipative(m);
  auto [w0, w1] = transformed_data(m, f, u0, u1);
  ModeTrajectory tr;
  tr.xi = xi;
  tr.times = times;
  tr.switch_time = std::numeric_limits<double>::infinity();
  OdeOptions oo;
  oo.rel_tol = tol;
  oo.abs_tol = 1e-3 * tol;
  AdaptiveIntegrator<4> ode(oo);
  std::array<double, 4> y{w0.real(), w0.imag(), w1.real(), w1.imag()};
  double tau = f.tau0;
  const double k2 = xi * xi;
  auto rhs = [&](const std::array<double, 4>& s, std::array<double, 4>& d, double tt) {
    const double x = 1.0 + tt;
    d[0] = s[2];
    d[1] = s[3];
    if (f.potential_branch) {
      const double c = k2 + f.w_potential / (x * x);
      d[2] = -c * s[0];
      d[3] = -c * s[1];
    } else {
      const double g = f.w_damping / x;
      d[2] = -g * s[2] - k2 * s[0];
      d[3] = -g * s[3] - k2 * s[1];
    }
  };
  auto cap = [&](double tt) {
    const double x = 1.0 + tt;
    return 0.1 / std::max(xi, 1.0 / x);
  };
  for (double t : times) {
    const double target = m.A(t) - 1.0;
    ode.advance(rhs, y, tau, std::max(target, tau), cap);
    const double x = 1.0 + tau;
    const cplx w(y[0], y[1]), wt(y[2], y[3]);
    const double e = f.w_exponent, s = std::pow(x, e);
    const cplx v = s * w, vt = s * (wt + e / x * w);
    tr.u.push_back(v);
    tr.ut.push_back(speed_at(m, x) * vt);
  }
  tr.steps = ode.steps();
  return tr;
}

std::string to_string(RateScale s) { return s == RateScale::T ? "t" : "1+t"; }

std::string to_string(LqBranch b) {
  switch (b) {
    case LqBranch::L2: return "L2";
    case LqBranch::NonPosDelta: return "delta<=0";
    case LqBranch::NonPosCritical: return "delta<=0,critical-n";
    case LqBranch::NotCovered: return "not-covered";
    case LqBranch::PosFast: return "delta>0,fast";
    case LqBranch::PosCritical: return "delta>0,critical";
    case LqBranch::PosSlow: return "delta>0,slow";
  }
  return "?";
}

RatePrediction predict_rates(const ScaleInvariantModel& m, double q, double kappa, int n) {
  if (!(q >= 1.0 && q <= 2.0)) throw DomainError("q must lie in [1, 2]");
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw DomainError("kappa must lie in [0, 1]");
  if (n < 1) throw DomainError("dimension n must be >= 1");
  if (auto bad = m.check(); !bad.empty()) throw DomainError(bad.front());

  // A ~ A0 e^(t/A0) for alpha = 1, A ~ c (1+t)^(1/(1-alpha)) otherwise.
  const RateScale scale = m.alpha == 1.0 ? RateScale::T : RateScale::OnePlusT;
  const double factor = m.alpha == 1.0 ? 1.0 / m.A0 : 1.0 / (1.0 - m.alpha);
  auto make = [&](double Ap, double lp) {
    return RateExponent{Ap, lp, scale, std::isfinite(Ap) ? Ap * factor : kNaN};
  };

  const double d = m.delta, sd = d > 0.0 ? std::sqrt(d) : 0.0, al = m.alpha;
  RatePrediction r;
  r.q = q;
  r.kappa = kappa;
  r.n = n;
  if (d < 0.0) r.potential = make(1.0 - al, 0.0);
  else if (d == 0.0) r.potential = make(1.0 - al, 2.0);
  else r.potential = make(1.0 - al + sd, 0.0);
  r.kinetic = d < 1.0 ? make(al, 0.0) : make(al - 1.0 + sd, 0.0);

  LqCase& c = r.lq_case;
  if (q == 2.0) {
    c.branch = LqBranch::L2;
    c.rate = r.potential;
    return r;
  }
  const double g = (2.0 - q) / q;  // (2-q)/q
  if (d <= 0.0) {
    const double n_crit = q / (2.0 - q);
    const double gamma = d == 0.0 ? 1.0 : 0.0;
    if (near(n, n_crit)) {
      c.branch = LqBranch::NonPosCritical;
      c.d_log_power = g / 2.0;
    } else if (n > n_crit) {
      c.branch = LqBranch::NonPosDelta;
    } else {
      c.branch = LqBranch::NotCovered;
      c.rate = make(kNaN, 0.0);
      return r;
    }
    c.rate = make(-al, 2.0 * (gamma + c.d_log_power));
  } else {
    const double lhs = 1.0 + sd, rhs = g * n + 2.0 * kappa;
    if (near(lhs, rhs)) {
      c.branch = LqBranch::PosCritical;
      c.rate = make(-al, 2.0 * g);
    } else if (lhs > rhs) {
      c.branch = LqBranch::PosFast;
      c.rate = make(2.0 * (-kappa - g * n / 2.0 + (1.0 - al + sd) / 2.0), 0.0);
    } else {
      c.branch = LqBranch::PosSlow;
      c.rate = make(-al, 0.0);
    }
  }
  return r;
}

nlohmann::json to_json(const RatePrediction& r) {
  return {{"q", r.q},
          {"kappa", r.kappa},
          {"n", r.n},
          {"potential", rate_json(r.potential)},
          {"kinetic", rate_json(r.kinetic)},
          {"lq_case",
           {{"branch", to_string(r.lq_case.branch)},
            {"rate", rate_json(r.lq_case.rate)},
            {"d_log_power", r.lq_case.d_log_power}}}};
}

ExponentFit fit_exponent(const std::vector<double>& t, const std::vector<double>& y,
                         RateScale scale, double lo, double hi, double log_power) {
  std::vector<double> one, x, ly;
  for (std::size_t i = 0; i < t.size() && i < y.size(); ++i) {
    if (t[i] < lo || t[i] > hi || !(y[i] > 0.0) || !std::isfinite(y[i])) continue;
    one.push_back(1.0);
    x.push_back(scale == RateScale::T ? t[i] : std::log1p(t[i]));
    ly.push_back(std::log(y[i]) - log_power * std::log(std::log(std::exp(1.0) + t[i])));
  }
  if (ly.size() < 3) throw DomainError("fit_exponent: fewer than 3 usable points in the window");
  ExponentFit f;
  f.lo = lo;
  f.hi = hi;
  f.samples = static_cast<int>(ly.size());
  f.exponent = least_squares({one, x}, ly, &f.rms)[1];
  return f;
}

std::pair<double, double> final_decade(const ScaleInvariantModel& m, RateScale scale, double T) {
  if (scale == RateScale::T) return {T - m.A0 * std::log(10.0), T};
  return {(1.0 + T) / 10.0 - 1.0, T};
}

SpectralMeasure rate_probe_measure(const ScaleInvariantModel& m, double horizon, int count) {
  const double low_hi = 1e-3 / m.A(horizon);
  SpectralMeasure s = two_packet_measure(count, low_hi, 0.5, 2.0, 1);
  const std::size_t half = static_cast<std::size_t>(count / 2);
  // Low packet starts on the dominant zero-frequency solution v = x^r (x = A/A0),
  // times (1 + ln x) when the indicial roots coincide.
  const double sd = m.delta > 0.0 ? std::sqrt(m.delta) : 0.0;
  const cplx r = m.delta < 0.0
                     ? cplx((1.0 - m.alpha) / 2.0, std::sqrt(-m.delta) / 2.0)
                     : cplx((1.0 - m.alpha + sd) / 2.0, 0.0);
  const cplx u1_low = (r + (m.delta == 0.0 ? 1.0 : 0.0)) / m.A0;
  // The low packet carries the potential growth. The kinetic rate comes from the
  // middle packet when delta < 1 and from the low packet otherwise, so the other
  // packet is damped to keep it out of the fit window.
  double wl = 0.0, wm = 0.0;
  for (std::size_t i = 0; i < s.xi.size(); ++i) (i < half ? wl : wm) += s.weight[i];
  if (m.delta < 1.0) wl *= 1e2;
  else wm *= 1e6;
  for (std::size_t i = 0; i < s.xi.size(); ++i) {
    s.weight[i] /= i < half ? wl : wm;
    if (i < half) s.u1[i] = u1_low;
  }
  return s;
}

std::string to_string(FitStatus s) {
  switch (s) {
    case FitStatus::Pass: return "pass";
    case FitStatus::Fail: return "fail";
    case FitStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

bool RateReport::passed() const {
  return potential.status == FitStatus::Pass && kinetic.status == FitStatus::Pass;
}

RateReport verify_rates(const ScaleInvariantModel& m, const RatePrediction& pred,
                        const RateSimConfig& cfg, ExecutionPolicy policy) {
  if (cfg.data.xi.empty()) throw DomainError("verify_rates: empty spectral data");
  if (!(cfg.horizon > 0.0) || cfg.samples < 8) throw DomainError("verify_rates: bad horizon");
  const CoefficientProfile p = m.profile();
  const RateScale scale = pred.potential.scale;
  const auto times = scale == RateScale::T ? linear_grid(0.0, cfg.horizon, cfg.samples)
                                           : geometric_grid(0.0, cfg.horizon, cfg.samples);
  const auto tr = sweep_modes(p, cfg.data, times, cfg.mode, policy);
  const EnergySeries e = assemble_energies(tr, p, std::nullopt, cfg.data.weight);
  const auto [lo, hi] = final_decade(m, scale, cfg.horizon);

  RateReport rep;
  // The window must start after A has grown by a decade from A0.
  const bool short_horizon = lo <= 0.0 || m.A(lo) < 10.0 * m.A0;
  if (short_horizon) rep.notes.push_back("horizon too short: fit window is pre-asymptotic");
  auto run = [&](const char* name, const std::vector<double>& y, const RateExponent& want) {
    RateCheck c;
    c.quantity = name;
    c.predicted = want.power;
    if (short_horizon || !std::isfinite(want.power)) return c;
    c.fit = fit_exponent(e.t, y, scale, lo, hi, want.log_power);
    c.fitted = c.fit.exponent;
    if (c.fit.samples < 8 || c.fit.rms > cfg.rms_gate) {
      rep.notes.push_back(std::string(name) + ": fit window too sparse or too noisy");
      return c;
    }
    c.status = std::abs(c.fitted - c.predicted) <= cfg.tolerance ? FitStatus::Pass : FitStatus::Fail;
    return c;
  };
  rep.potential = run("potential", e.potential, pred.potential);
  rep.kinetic = run("kinetic", e.kinetic, pred.kinetic);
  return rep;
}

nlohmann::json to_json(const RateReport& r) {
  auto one = [](const RateCheck& c) {
    return nlohmann::json{{"quantity", c.quantity},
                          {"fitted", c.fitted},
                          {"predicted", c.predicted},
                          {"rms", c.fit.rms},
                          {"window", {c.fit.lo, c.fit.hi}},
                          {"samples", c.fit.samples},
                          {"status", to_string(c.status)}};
  };
  return {{"potential", one(r.potential)},
          {"kinetic", one(r.kinetic)},
          {"notes", r.notes},
          {"passed", r.passed()}};
}

}  // namespace kgspec
