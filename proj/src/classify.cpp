#include "kgspec/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace kgspec {

std::string to_string(Kind k) {
  switch (k) {
    case Kind::Scattering: return "Scattering";
    case Kind::NonEffective: return "NonEffective";
    case Kind::Effective: return "Effective";
    case Kind::GreyZone: return "GreyZone";
    case Kind::Undetermined: return "Undetermined";
  }
  return "?";
}

std::string to_string(MuLimit m) {
  switch (m) {
    case MuLimit::ToZero: return "to_zero";
    case MuLimit::ToInfinity: return "to_infinity";
    case MuLimit::Finite: return "finite";
    case MuLimit::Undetermined: return "undetermined";
  }
  return "?";
}

std::string to_string(PsiProvenance p) {
  switch (p) {
    case PsiProvenance::ClosedFormFamily: return "closed_form_family";
    case PsiProvenance::ScaleInvariantExponent: return "scale_invariant_exponent";
    case PsiProvenance::UserSupplied: return "user_supplied";
  }
  return "?";
}

namespace {

double lnL(double t) { return std::log(std::log(std::numbers::e + t)); }

struct Samples {
  std::vector<double> t, y;
  bool positive = true;
  bool all_zero = true;
};

Samples sample_log(const std::function<double(double)>& f, double lo, double hi, int n) {
  Samples s;
  for (int i = 0; i < n; ++i) {
    const double t = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    const double v = f(t);
    if (!std::isfinite(v)) throw NumericalError("non-finite sample at t = " + std::to_string(t));
    if (v != 0.0) s.all_zero = false;
    if (!(v > 0.0)) s.positive = false;
    s.t.push_back(t);
    s.y.push_back(v > 0.0 ? std::log(v) : 0.0);
  }
  return s;
}

}  // namespace

TailFit fit_tail(const std::function<double(double)>& f, double t_lo, double t_hi, int samples) {
  if (!(t_lo > 0.0 && t_hi > t_lo)) throw DomainError("fit_tail needs 0 < t_lo < t_hi");
  Samples s = sample_log(f, t_lo, t_hi, samples);
  if (!s.positive) throw DomainError("fit_tail: function is not positive on the window");
  std::vector<double> one(s.t.size(), 1.0), lt, ll;
  for (double t : s.t) {
    lt.push_back(std::log1p(t));
    ll.push_back(lnL(t));
  }
  TailFit r;
  auto b = least_squares({one, lt, ll}, s.y, &r.rms);
  r.c = b[0];
  r.p = b[1];
  r.q = b[2];
  r.t_lo = t_lo;
  r.t_hi = t_hi;
  return r;
}

TailFit fit_tail_pinned(const std::function<double(double)>& f, double t_lo, double t_hi,
                        double p, int samples) {
  Samples s = sample_log(f, t_lo, t_hi, samples);
  if (!s.positive) throw DomainError("fit_tail: function is not positive on the window");
  std::vector<double> one(s.t.size(), 1.0), ll, y;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    ll.push_back(lnL(s.t[i]));
    y.push_back(s.y[i] - p * std::log1p(s.t[i]));
  }
  TailFit r;
  auto b = least_squares({one, ll}, y, &r.rms);
  r.c = b[0];
  r.p = p;
  r.q = b[1];
  r.t_lo = t_lo;
  r.t_hi = t_hi;
  r.pinned = true;
  return r;
}

IntegrabilityVerdict integrability(const std::function<double(double)>& f, double T, double tol,
                                   double band) {
  IntegrabilityVerdict v;
  const double lo = T / 10.0;
  Samples s = sample_log(f, lo, T, 16);
  if (s.all_zero) {
    v.verdict = Integrability::Integrable;
    v.fit.p = -std::numeric_limits<double>::infinity();
    v.fit.t_lo = lo;
    v.fit.t_hi = T;
    return v;
  }
  if (!s.positive) return v;
  v.fit = fit_tail(f, lo, T);
  if (v.fit.rms > tol) return v;
  if (v.fit.p < -1.0 - band) {
    v.verdict = Integrability::Integrable;
  } else if (v.fit.p > -1.0 + band) {
    v.verdict = Integrability::Divergent;
  } else {
    // Borderline 1/t decay: the logarithmic exponent decides.
    v.fit = fit_tail_pinned(f, lo, T, -1.0);
    v.heuristic = true;
    if (v.fit.rms > tol) {
      v.verdict = Integrability::Undetermined;
    } else {
      v.verdict = v.fit.q < -1.0 - band ? Integrability::Integrable : Integrability::Divergent;
    }
  }
  return v;
}

double tail_integral(const IntegrabilityVerdict& v, const std::function<double(double)>& f,
                     double T) {
  if (v.verdict != Integrability::Integrable) return std::numeric_limits<double>::infinity();
  if (std::isinf(v.fit.p)) return 0.0;
  const double fT = f(T);
  if (v.fit.p < -1.0) return fT * (1.0 + T) / (-v.fit.p - 1.0);
  // f ~ c / (t L^beta), beta = -q > 1
  return fT * (1.0 + T) * std::log(std::numbers::e + T) / (-v.fit.q - 1.0);
}

namespace {

double integrate_long(const std::function<double(double)>& f, double T, bool* converged) {
  QuadOptions q;
  q.rel_tol = 1e-9;
  double s = 0.0, lo = 0.0, hi = std::min(1.0, T);
  while (lo < T) {
    try {
      s += integrate(f, lo, hi, q);
    } catch (const QuadratureError&) {
      *converged = false;
      s += gauss_legendre(f, lo, hi, 20);
    }
    lo = hi;
    hi = std::min(2.0 * hi, T);
  }
  return s;
}

}  // namespace

Classification classify(const CoefficientProfile& p, double T_max, double tol) {
  if (!(T_max > 10.0)) throw DomainError("classify needs T_max > 10");
  if (!(tol > 0.0)) throw DomainError("classify needs tol > 0");
  Classification c;
  c.T_max = T_max;
  auto integrand = [&p](double t) {
    const double mv = p.m(t);
    return p.primitive(t) / p.a(t) * mv * mv;
  };
  c.scattering_integral = integrate_long(integrand, T_max, &c.integral_converged);
  if (!c.integral_converged) c.notes.push_back("scattering integral quadrature did not converge");
  c.scattering = integrability(integrand, T_max, tol);

  auto mu = [&p](double t) { return p.mu(t); };
  c.mu_value = p.mu(T_max);
  const double lo = T_max / 10.0;
  Samples ms = sample_log(mu, lo, T_max, 16);
  if (ms.positive) {
    c.mu_fit = fit_tail(mu, lo, T_max);
    const double band = 0.05;
    if (c.mu_fit.rms > tol) {
      c.mu_limit = MuLimit::Undetermined;
      c.notes.push_back("mu fit residual above tolerance (oscillation or transient)");
    } else if (c.mu_fit.p > band) {
      c.mu_limit = MuLimit::ToInfinity;
    } else if (c.mu_fit.p < -band) {
      c.mu_limit = MuLimit::ToZero;
    } else {
      c.mu_fit = fit_tail_pinned(mu, lo, T_max, 0.0);
      c.mu_heuristic = true;
      if (c.mu_fit.rms > tol) c.mu_limit = MuLimit::Undetermined;
      else if (c.mu_fit.q < -band) c.mu_limit = MuLimit::ToZero;
      else if (c.mu_fit.q > band) c.mu_limit = MuLimit::ToInfinity;
      else c.mu_limit = MuLimit::Finite;
    }
  } else if (ms.all_zero) {
    c.mu_limit = MuLimit::ToZero;
  }

  if (c.scattering.verdict == Integrability::Integrable) {
    c.kind = Kind::Scattering;
  } else if (c.mu_limit == MuLimit::ToInfinity) {
    c.kind = Kind::Effective;
  } else if (c.mu_limit == MuLimit::Finite && c.mu_value > 0.0) {
    c.kind = Kind::GreyZone;
  } else if (c.mu_limit == MuLimit::ToZero &&
             c.scattering.verdict == Integrability::Divergent) {
    c.kind = Kind::NonEffective;
  } else {
    c.kind = Kind::Undetermined;
    c.notes.push_back("no class of the taxonomy fits the probed behaviour");
  }
  if (c.kind == Kind::GreyZone) {
    c.notes.push_back("mu -> " + std::to_string(c.mu_value) + (c.mu_value * c.mu_value < 0.25
                          ? " (mu^2 < 1/4)" : " (mu^2 >= 1/4)"));
  }
  for (auto& w : p.normalization_warnings()) c.notes.push_back("warning: " + w);
  return c;
}

nlohmann::json to_json(const Classification& c) {
  auto fit = [](const TailFit& f) {
    return nlohmann::json{{"c", f.c}, {"p", std::isfinite(f.p) ? nlohmann::json(f.p) : nlohmann::json("-inf")},
                          {"q", f.q}, {"rms", f.rms}, {"t_lo", f.t_lo}, {"t_hi", f.t_hi},
                          {"pinned", f.pinned}};
  };
  const char* verdicts[] = {"integrable", "divergent", "undetermined"};
  return {{"kind", to_string(c.kind)},
          {"T_max", c.T_max},
          {"scattering_integral", c.scattering_integral},
          {"scattering_tail", fit(c.scattering.fit)},
          {"scattering_verdict", verdicts[static_cast<int>(c.scattering.verdict)]},
          {"mu_limit", to_string(c.mu_limit)},
          {"mu_value", c.mu_value},
          {"mu_fit", fit(c.mu_fit)},
          {"confidence",
           {{"integral_converged", c.integral_converged},
            {"scattering_heuristic", c.scattering.heuristic},
            {"mu_heuristic", c.mu_heuristic}}},
          {"notes", c.notes}};
}

PsiProfile user_psi(Smooth psi, std::string description) {
  return {std::move(psi), PsiProvenance::UserSupplied, std::move(description)};
}

PsiProfile build_psi(const CoefficientProfile& p) {
  const std::string& mass = p.mass_name();
  if (mass == "zero") {
    return {{[](double) { return 1.0; }, [](double) { return 0.0; }, [](double) { return 0.0; }},
            PsiProvenance::ClosedFormFamily, "psi = 1"};
  }
  if (mass == "power" && *p.mass_param("k") == -1.0) {
    const double c = *p.mass_param("mu0");
    if (!(c * c < 0.25)) throw DomainError("psi = (1+t)^sigma needs mu^2 < 1/4");
    const double s = 0.5 * (1.0 - std::sqrt(1.0 - 4.0 * c * c));
    return {{[s](double t) { return std::pow(1.0 + t, s); },
             [s](double t) { return s * std::pow(1.0 + t, s - 1.0); },
             [s](double t) { return s * (s - 1.0) * std::pow(1.0 + t, s - 2.0); }},
            PsiProvenance::ScaleInvariantExponent,
            "psi = (1+t)^sigma, sigma = " + std::to_string(s)};
  }
  if (mass == "scale_invariant") {
    const auto alpha = p.speed_param("alpha");
    if (!alpha) {
      throw DomainError("no constructive psi available: m = mu a/A needs a scale-invariant speed");
    }
    const double mu = *p.mass_param("mu");
    const double delta = (*alpha - 1.0) * (*alpha - 1.0) - 4.0 * mu * mu;
    if (delta < 0.0) throw DomainError("psi = (A/A0)^sigma needs delta >= 0");
    const double s = 0.5 * (1.0 - *alpha - std::sqrt(delta));
    const double A0 = p.A0();
    auto prof = p;
    return {{[prof, s, A0](double t) { return std::pow(prof.primitive(t) / A0, s); },
             [prof, s, A0](double t) {
               const double A = prof.primitive(t);
               return s * std::pow(A / A0, s) * prof.a(t) / A;
             },
             [prof, s, A0](double t) {
               const double A = prof.primitive(t), a = prof.a(t);
               const double r = a / A;
               return std::pow(A / A0, s) * (s * s * r * r + s * (prof.a1(t) / A - r * r));
             }},
            PsiProvenance::ScaleInvariantExponent,
            "psi = (A/A0)^sigma, sigma = " + std::to_string(s)};
  }
  if (mass == "log") {
    const double mu0 = *p.mass_param("mu0"), g = *p.mass_param("gamma");
    const double k = mu0 * mu0;
    // psi = exp(int_0^t mu(s)^2/(e+s) ds) with mu(s) = mu0 L^-gamma
    auto logpsi = [k, g](double t) {
      const double L = std::log(std::numbers::e + t);
      if (std::abs(1.0 - 2.0 * g) < 1e-14) return k * std::log(L);
      return k * (std::pow(L, 1.0 - 2.0 * g) - 1.0) / (1.0 - 2.0 * g);
    };
    auto rate = [k, g](double t) {
      return k * std::pow(std::log(std::numbers::e + t), -2.0 * g) / (std::numbers::e + t);
    };
    auto rate1 = [k, g](double t) {
      const double x = std::numbers::e + t, L = std::log(x);
      return -k * std::pow(L, -2.0 * g) / (x * x) * (1.0 + 2.0 * g / L);
    };
    return {{[logpsi](double t) { return std::exp(logpsi(t)); },
             [logpsi, rate](double t) { return std::exp(logpsi(t)) * rate(t); },
             [logpsi, rate, rate1](double t) {
               const double r = rate(t);
               return std::exp(logpsi(t)) * (rate1(t) + r * r);
             }},
            PsiProvenance::ClosedFormFamily,
            "psi = exp(int mu^2/(e+t)), mu0 = " + std::to_string(mu0) +
                ", gamma = " + std::to_string(g)};
  }
  throw DomainError(
      "no constructive psi available for mass family '" + mass +
      "'; the general exponential series with Catalan-type coefficients is not built, "
      "supply psi explicitly");
}

HypothesisReport check_hypothesis3(const CoefficientProfile& p, const PsiProfile& psi,
                                   const std::vector<double>& grid, const Hypothesis3Options& opt) {
  if (grid.size() < 4) throw DomainError("hypothesis 3 needs at least 4 grid points");
  if (!std::is_sorted(grid.begin(), grid.end()) || grid.front() < 0.0) {
    throw DomainError("hypothesis 3 grid must be sorted and nonnegative");
  }
  HypothesisReport r;
  r.hypothesis = "H3";
  r.grid = grid;
  const auto& f = psi.psi;

  ClauseResult init{"psi(0) = 1", std::abs(f.f(0.0) - 1.0), 0.0, false, false};
  init.satisfied = init.constant < 1e-12;
  r.clauses.push_back(init);

  ClauseResult mono{"psi non-decreasing", 0.0, grid.front(), true, false};
  for (double t : grid) {
    if (f.d1(t) < -1e-14 * f.f(t)) {
      mono.satisfied = false;
      mono.worst_t = t;
      mono.constant = f.d1(t);
      break;
    }
  }
  r.clauses.push_back(mono);

  ClauseResult slope{"|psi'|/psi < c eta", 0.0, grid.front(), false, false};
  for (double t : grid) {
    const double v = std::abs(f.d1(t)) / f.f(t) / p.eta(t);
    if (v > slope.constant) {
      slope.constant = v;
      slope.worst_t = t;
    }
  }
  slope.satisfied = slope.constant < 1.0;
  r.clauses.push_back(slope);

  // S1(t) = psi^2 eta int_0^t psi^-2
  QuadOptions q;
  q.rel_tol = 1e-10;
  auto inv2 = [&f](double t) {
    const double v = f.f(t);
    return 1.0 / (v * v);
  };
  ClauseResult s1{"sup S1 = psi^2 eta int psi^-2", 0.0, grid.front(), false, false};
  double cum = grid.front() > 0.0 ? integrate(inv2, 0.0, grid.front(), q) : 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0) cum += integrate(inv2, grid[i - 1], grid[i], q);
    const double v = f.f(grid[i]);
    const double val = v * v * p.eta(grid[i]) * cum;
    if (val > s1.constant) {
      s1.constant = val;
      s1.worst_t = grid[i];
    }
  }
  s1.satisfied = s1.constant <= opt.cap;
  r.clauses.push_back(s1);

  // S2 = int_0^inf |psi''/psi + m^2| / eta
  auto g = [&](double t) {
    const double mv = p.m(t);
    return std::abs(f.d2(t) / f.f(t) + mv * mv) / p.eta(t);
  };
  auto ref = [&](double t) {
    const double mv = p.m(t);
    return (std::abs(f.d2(t) / f.f(t)) + mv * mv) / p.eta(t);
  };
  double s2 = 0.0;
  if (grid.front() > 0.0) {
    QuadOptions q2 = q;
    q2.abs_tol = 1e-12 * gauss_legendre(ref, 0.0, grid.front(), 20);
    s2 += integrate(g, 0.0, grid.front(), q2);
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    try {
      // Rounding noise in a cancelling integrand never meets a relative target.
      QuadOptions q2 = q;
      q2.abs_tol = 1e-12 * gauss_legendre(ref, grid[i - 1], grid[i], 20);
      s2 += integrate(g, grid[i - 1], grid[i], q2);
    } catch (const QuadratureError&) {
      s2 += gauss_legendre(g, grid[i - 1], grid[i], 20);
    }
  }
  const double T = grid.back();
  bool cancels = true;
  for (double t : geometric_grid(T / 10.0, T, 16)) {
    if (g(t) > 1e-9 * ref(t)) cancels = false;
  }
  ClauseResult s2c{"S2 = int |psi''/psi + m^2|/eta", s2, T, false, true};
  if (cancels) {
    s2c.satisfied = s2 <= opt.cap;
    r.notes.push_back("psi''/psi + m^2 vanishes to rounding on the tail");
  } else if (T > 10.0) {
    const auto v = integrability(g, T, 0.05);
    if (v.verdict == Integrability::Integrable) {
      s2c.constant = s2 + tail_integral(v, g, T);
      s2c.satisfied = s2c.constant <= opt.cap;
      r.notes.push_back("S2 tail exponent p = " + std::to_string(v.fit.p) +
                        ", q = " + std::to_string(v.fit.q));
    } else {
      s2c.satisfied = false;
      r.notes.push_back("S2 integrand tail is not integrable (p = " + std::to_string(v.fit.p) +
                        ", q = " + std::to_string(v.fit.q) + ")");
    }
  }
  r.clauses.push_back(s2c);

  // 1/(eta psi^2) increasing on the last half of the grid.
  ClauseResult inc{"1/(eta psi^2) eventually increasing", 0.0, T, true, true};
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t i = grid.size() / 2; i < grid.size(); ++i) {
    const double v = f.f(grid[i]);
    const double w = 1.0 / (p.eta(grid[i]) * v * v);
    if (w < prev) {
      inc.satisfied = false;
      inc.worst_t = grid[i];
      break;
    }
    prev = w;
  }
  r.clauses.push_back(inc);
  return r;
}

}  // namespace kgspec
