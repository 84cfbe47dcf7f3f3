#include "kgspec/scatter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kgspec/ode.hpp"
#include "kgspec/parallel.hpp"
#include "kgspec/zones.hpp"

namespace kgspec {

namespace {

const cplx I1(0.0, 1.0);

Mat2c phase_diag(double phi) {
  Mat2c D = Mat2c::Zero();
  D(0, 0) = std::polar(1.0, phi);
  D(1, 1) = std::polar(1.0, -phi);
  return D;
}

// E_a (and optionally E_{a,m}) from anchor s in the slow frame E = Phi F with
// Phi = diag(e^{i phi}, e^{-i phi}), phi = |xi| (A(t) - A(s)).
class SlowFrame {
 public:
  SlowFrame(const CoefficientProfile& p, double xi, double s, bool with_mass,
            const ScatterOptions& opt)
      : p_(p), xi_(xi), s_(s), t_(s), A_s_(p.primitive(s)), with_mass_(with_mass), opt_(opt),
        ode_(OdeOptions{opt.ode_tol, opt.ode_tol * 1e-3}) {
    pack_into(Mat2c::Identity(), y_, 0);
    pack_into(Mat2c::Identity(), y_, 8);
  }

  void advance_to(double t) {
    auto rhs = [this](const std::array<double, 16>& y, std::array<double, 16>& d, double tt) {
      const double a = p_.a(tt);
      const double phi = xi_ * (p_.primitive(tt) - A_s_);
      const cplx e = std::polar(1.0, 2.0 * phi);
      // i R_a = (a'/2a) [[1,-1],[-1,1]]; i R_am = (i m^2 / 2 a xi) [[1,-1],[1,-1]].
      const double ra = 0.5 * p_.a1(tt) / a;
      Mat2c Ka;
      Ka << ra, -ra * std::conj(e), -ra * e, ra;
      const Mat2c F = unpack(y, 0);
      pack_into(Mat2c(Ka * F), d, 0);
      if (with_mass_) {
        const double m = p_.m(tt);
        const cplx rm = I1 * 0.5 * m * m / (a * xi_);
        Mat2c Km;
        Km << ra + rm, -(ra + rm) * std::conj(e), (rm - ra) * e, ra - rm;
        pack_into(Mat2c(Km * unpack(y, 8)), d, 8);
      } else {
        for (int i = 8; i < 16; ++i) d[i] = 0.0;
      }
    };
    auto cap = [this](double tt) {
      return std::min(opt_.period_fraction * std::numbers::pi / (p_.a(tt) * xi_),
                      0.5 / p_.eta(tt));
    };
    ode_.advance(rhs, y_, t_, t, cap);
  }

  double phi() const { return xi_ * (p_.primitive(t_) - A_s_); }
  Mat2c Ea() const { return phase_diag(phi()) * unpack(y_, 0); }
  Mat2c Eam() const { return phase_diag(phi()) * unpack(y_, 8); }
  // Q = E_a^-1 E_am = F^-1 G.
  Mat2c Q() const { return unpack(y_, 0).inverse() * unpack(y_, 8); }
  double t() const { return t_; }

 private:
  const CoefficientProfile& p_;
  double xi_, s_, t_, A_s_;
  bool with_mass_;
  ScatterOptions opt_;
  AdaptiveIntegrator<16> ode_;
  std::array<double, 16> y_{};
};

void require_increasing(const CoefficientProfile& p, double lo, double hi,
                        const ScatterOptions& opt) {
  if (opt.test_mode) return;
  for (double t : geometric_grid(lo, std::max(hi, lo + 1.0), 200)) {
    if (!(p.a1(t) > 0.0)) {
      throw DomainError("scattering requires a' > 0; a'(" + std::to_string(t) +
                        ") = " + std::to_string(p.a1(t)));
    }
  }
}

}  // namespace

std::string to_string(FundamentalKind k) {
  switch (k) {
    case FundamentalKind::PseudoE: return "pseudo_E";
    case FundamentalKind::FreeWaveEa: return "free_wave_Ea";
    case FundamentalKind::PerturbationQ: return "perturbation_Q";
    case FundamentalKind::ComposedEam: return "composed_Eam";
  }
  return "?";
}

double h_symbol(const CoefficientProfile& p, double t, double xi, double N) {
  const double a = p.a(t), e = p.eta(t);
  return std::sqrt(xi * xi * a * a + N * N * e * e);
}

Mat2c H_matrix(const CoefficientProfile& p, double t, double xi, double N) {
  Mat2c H = Mat2c::Identity();
  H(0, 0) = h_symbol(p, t, xi, N) / (xi * p.a(t));
  return H;
}

Mat2c M_matrix() {
  Mat2c M;
  M << 1.0, -1.0, 1.0, 1.0;
  return M;
}

Mat2c M_inv() {
  Mat2c M;
  M << 0.5, 0.5, -0.5, 0.5;
  return M;
}

Mat2c R_a(const CoefficientProfile& p, double t) {
  const cplx d = -I1 * p.a1(t) / p.a(t);  // D_t a / a
  Mat2c R;
  R << 0.5 * d, -0.5 * d, -0.5 * d, 0.5 * d;
  return R;
}

Mat2c R_am(const CoefficientProfile& p, double t, double xi) {
  const double m = p.m(t);
  const double r = 0.5 * m * m / (p.a(t) * xi);
  Mat2c R;
  R << r, -r, r, -r;
  return R;
}

FundamentalSolution free_wave_fundamental(const CoefficientProfile& p, double s,
                                          const std::vector<double>& times, double xi,
                                          const ScatterOptions& opt) {
  if (!(xi > 0.0)) throw DomainError("free_wave_fundamental: need |xi| > 0");
  if (p.primitive(s) * xi < opt.N * (1.0 - 1e-12)) {
    throw DomainError("free_wave_fundamental: (s, xi) lies in the pseudo-differential zone");
  }
  const double t_hi = times.empty() ? s : times.back();
  require_increasing(p, s, t_hi, opt);
  FundamentalSolution f;
  f.kind = FundamentalKind::FreeWaveEa;
  f.s = s;
  f.xi = xi;
  SlowFrame sf(p, xi, s, false, opt);
  for (double t : times) {
    if (t < sf.t()) throw DomainError("free_wave_fundamental: times must be sorted and >= s");
    sf.advance_to(t);
    f.t.push_back(t);
    f.value.push_back(sf.Ea());
  }
  return f;
}

Mat2c pseudo_fundamental(const CoefficientProfile& p, double t, double xi,
                         const ScatterOptions& opt) {
  ModeOptions mo;
  mo.tol = opt.ode_tol;
  mo.period_fraction = 0.1;
  const double a0 = p.a(0.0), h0 = h_symbol(p, 0.0, xi, opt.N);
  const double at = p.a(t), ht = h_symbol(p, t, xi, opt.N);
  Mat2c E;
  const cplx u0[2] = {std::sqrt(a0) / h0, 0.0};
  const cplx u1[2] = {0.0, I1 * std::sqrt(a0)};
  for (int j = 0; j < 2; ++j) {
    auto tr = integrate_mode_direct(p, xi, u0[j], u1[j], {t}, mo);
    E(0, j) = ht * tr.u[0] / std::sqrt(at);
    E(1, j) = -I1 * tr.ut[0] / std::sqrt(at);
  }
  return E;
}

PeanoBakerResult peano_baker(const std::function<Mat2c(double)>& P, double s, double t, int K,
                             double tol, int nodes) {
  if (K < 1) throw DomainError("peano_baker: need K_terms >= 1");
  if (!(t >= s)) throw DomainError("peano_baker: need s <= t");
  if (nodes < 4) throw DomainError("peano_baker: need at least 4 nodes");
  const int n = nodes;
  const int deg = n - 1;
  // Chebyshev-Lobatto nodes in ascending order.
  std::vector<double> th(n), x(n), tau(n);
  for (int j = 0; j < n; ++j) {
    th[j] = std::numbers::pi * (deg - j) / deg;
    x[j] = std::cos(th[j]);
    tau[j] = s + 0.5 * (t - s) * (x[j] + 1.0);
  }
  // S maps node values to node values of the integral from s.
  std::vector<double> S(static_cast<std::size_t>(n) * n, 0.0);
  const double half = 0.5 * (t - s);
  for (int l = 0; l < n; ++l) {
    // Coefficients of the cardinal function for node l.
    std::vector<double> c(n + 1, 0.0);
    const double wl = (l == 0 || l == deg) ? 0.5 : 1.0;
    for (int k = 0; k <= deg; ++k) {
      double ck = 2.0 / deg * wl * std::cos(k * th[l]);
      if (k == 0 || k == deg) ck *= 0.5;
      c[k] = ck;
    }
    std::vector<double> b(n + 1, 0.0);
    for (int k = 1; k <= deg + 1; ++k) {
      const double cm = k >= 2 ? c[k - 1] : 2.0 * c[0];
      const double cp = k + 1 <= deg ? c[k + 1] : 0.0;
      b[k] = (cm - cp) / (2.0 * k);
    }
    double b0 = 0.0;
    for (int k = 1; k <= deg + 1; ++k) b0 -= b[k] * ((k % 2) ? -1.0 : 1.0);
    b[0] = b0;
    for (int j = 0; j < n; ++j) {
      double v = b[0];
      for (int k = 1; k <= deg + 1; ++k) v += b[k] * std::cos(k * th[j]);
      S[static_cast<std::size_t>(j) * n + l] = half * v;
    }
  }
  std::vector<Mat2c> Pv(n), Y(n, Mat2c::Identity()), total(n, Mat2c::Identity());
  std::vector<double> pn(n);
  for (int j = 0; j < n; ++j) {
    Pv[j] = P(tau[j]);
    pn[j] = opnorm(Pv[j]);
  }
  PeanoBakerResult r;
  for (int k = 1; k <= K; ++k) {
    std::vector<Mat2c> prod(n);
    for (int j = 0; j < n; ++j) prod[j] = Pv[j] * Y[j];
    std::vector<Mat2c> next(n, Mat2c::Zero());
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) next[j] += S[static_cast<std::size_t>(j) * n + l] * prod[l];
      next[j] *= I1;
    }
    Y = std::move(next);
    for (int j = 0; j < n; ++j) total[j] += Y[j];
    r.term_norms.push_back(opnorm(Y[deg]));
  }
  double L = 0.0;
  for (int l = 0; l < n; ++l) L += S[static_cast<std::size_t>(deg) * n + l] * pn[l];
  r.Q = total[deg];
  r.terms = K;
  r.norm_integral = L;
  r.bound = std::exp((K + 1) * std::log(std::max(L, 1e-300)) - std::lgamma(K + 2.0) + L);
  if (L == 0.0) r.bound = 0.0;
  r.rounding = n * std::numeric_limits<double>::epsilon() * std::exp(L);
  if (r.bound > tol) {
    throw NumericalError("peano_baker: truncation bound " + std::to_string(r.bound) +
                         " exceeds tolerance at K = " + std::to_string(K) +
                         "; use more terms or the ODE path");
  }
  return r;
}

ClauseResult check_additional_scattering(const CoefficientProfile& p,
                                         const std::vector<double>& grid, double cap) {
  ClauseResult c{"sqrt(a) int sqrt(a) <= C A", 0.0, 0.0, false, true};
  auto sa = [&](double t) { return std::sqrt(p.a(t)); };
  double cum = 0.0, prev = 0.0;
  for (double t : grid) {
    if (t > prev) cum += integrate(sa, prev, t);
    prev = std::max(prev, t);
    const double v = sa(t) * cum / p.primitive(t);
    if (v > c.constant) {
      c.constant = v;
      c.worst_t = t;
    }
  }
  c.satisfied = c.constant <= cap;
  return c;
}

std::vector<double> scattering_tail(const CoefficientProfile& p, const std::vector<double>& t,
                                    double T_end) {
  auto f = [&](double s) {
    const double m = p.m(s);
    return p.primitive(s) / p.a(s) * m * m;
  };
  auto v = integrability(f, T_end, 0.05);
  double tail = 0.0;
  if (v.verdict == Integrability::Integrable) {
    tail = tail_integral(v, f, T_end);
  } else {
    tail = std::numeric_limits<double>::infinity();
  }
  std::vector<double> out(t.size());
  double acc = tail, hi = T_end;
  for (std::size_t k = t.size(); k-- > 0;) {
    const double lo = t[k];
    if (lo < hi) {
      QuadOptions q;
      q.rel_tol = 1e-10;
      acc += integrate(f, lo, hi, q);
      hi = lo;
    }
    out[k] = acc;
  }
  return out;
}

WaveOperatorSample wave_operator(const CoefficientProfile& p, double xi, double epsilon_cutoff,
                                 double tol, const ScatterOptions& opt) {
  if (!(epsilon_cutoff > 0.0)) throw DomainError("wave_operator: cutoff epsilon must be positive");
  if (xi < epsilon_cutoff) {
    throw DomainError("wave_operator: |xi| = " + std::to_string(xi) +
                      " is below the cutoff epsilon");
  }
  const auto cls = classify(p, std::max(opt.horizon, 1e4));
  if (cls.kind != Kind::Scattering) {
    throw DomainError("wave_operator: profile classifies as " + to_string(cls.kind) +
                      ", not scattering");
  }
  require_increasing(p, 0.0, opt.horizon, opt);

  WaveOperatorSample w;
  w.xi = xi;
  ZoneGeometry g;
  g.N = opt.N;
  w.theta = separating_time(g, p, xi);
  const double s = w.theta;
  if (!std::isfinite(s)) throw DomainError("wave_operator: xi never enters the hyperbolic zone");

  const Mat2c E_s0 = pseudo_fundamental(p, s, xi, opt);
  const Mat2c Hs_inv = H_matrix(p, s, xi, opt.N).inverse();
  const double pref = std::sqrt(p.a(s) / p.a(0.0));
  const Mat2c M = M_matrix(), Mi = M_inv();

  SlowFrame from0(p, xi, 0.0, false, opt);
  from0.advance_to(s);
  const Mat2c Ea_s0 = from0.Ea();
  SlowFrame froms(p, xi, s, true, opt);

  std::vector<Mat2c> Qs, Ws;
  Mat2c prevQ = Mat2c::Identity();
  double int_R = 0.0;
  double prev_t = s;
  auto Rnorm = [&](double t) {
    const double m = p.m(t);
    return m * m / (p.a(t) * xi);
  };
  for (int k = 1;; ++k) {
    const double t = (1.0 + s) * std::pow(opt.ladder_ratio, k) - 1.0;
    if (t > opt.t_cap) {
      throw NumericalError("wave_operator: no convergence by t = " + std::to_string(opt.t_cap) +
                           "; last increment " + std::to_string(w.last_increment));
    }
    from0.advance_to(t);
    froms.advance_to(t);
    const Mat2c Q = froms.Q();
    const Mat2c Eam = froms.Eam();
    const Mat2c Ea_ts = froms.Ea();
    const Mat2c W = pref * M * from0.Ea().inverse() * Mi * H_matrix(p, t, xi, opt.N) * M * Eam *
                    Mi * Hs_inv * E_s0;
    w.t.push_back(t);
    Qs.push_back(Q);
    Ws.push_back(W);

    int_R += integrate(Rnorm, prev_t, t);
    prev_t = t;
    const Mat2c P = Ea_ts.inverse() * R_am(p, t, xi) * Ea_ts;
    const double rn = opnorm(R_am(p, t, xi));
    const double m = p.m(t);
    const double bnd = p.primitive(t) / p.a(t) * m * m;
    if (rn > 0.0) w.P_over_R = std::max(w.P_over_R, opnorm(P) / rn);
    if (bnd > 0.0) w.R_over_bound = std::max(w.R_over_bound, rn / bnd);
    w.Q_over_exp = std::max(w.Q_over_exp, opnorm(Q) / std::exp(int_R));
    const double hr = h_symbol(p, t, xi, opt.N) / (xi * p.a(t));
    w.H_sup = std::max(w.H_sup, hr);
    w.H_last_dev = hr - 1.0;

    w.last_increment = opnorm(Mat2c(Q - prevQ));
    prevQ = Q;
    if (t >= opt.horizon && w.last_increment < tol) {
      w.converged_at = t;
      break;
    }
  }
  w.Q_limit = Qs.back();
  w.W_plus = pref * M * Ea_s0.inverse() * w.Q_limit * Mi * Hs_inv * E_s0;
  for (std::size_t k = 0; k < Qs.size(); ++k) {
    w.q_residual.push_back(opnorm(Mat2c(Qs[k] - w.Q_limit)));
    w.multiplier_residual.push_back(opnorm(Mat2c(Ws[k] - w.W_plus)));
  }
  w.bound = scattering_tail(p, w.t, w.t.back());
  if (!cls.notes.empty()) w.notes = cls.notes;
  return w;
}

nlohmann::json to_json(const WaveOperatorSample& w) {
  auto mat = [](const Mat2c& m) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < 2; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int j = 0; j < 2; ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
      a.push_back(row);
    }
    return a;
  };
  return {{"xi", w.xi},
          {"theta", w.theta},
          {"Q_limit", mat(w.Q_limit)},
          {"W_plus", mat(w.W_plus)},
          {"last_increment", w.last_increment},
          {"converged_at", w.converged_at},
          {"P_over_R", w.P_over_R},
          {"R_over_bound", w.R_over_bound},
          {"Q_over_exp", w.Q_over_exp},
          {"H_sup", w.H_sup},
          {"H_last_dev", w.H_last_dev},
          {"notes", w.notes}};
}

DiscrepancyCurve asymptotic_equivalence(const CoefficientProfile& p, const SpectralMeasure& data,
                                        double epsilon_cutoff, const std::vector<double>& t_probe,
                                        double tol, const ScatterOptions& opt,
                                        ExecutionPolicy policy) {
  const std::size_t nm = data.xi.size();
  const std::size_t nt = t_probe.size();
  DiscrepancyCurve c;
  c.t = t_probe;
  c.samples.resize(nm);
  std::vector<std::vector<double>> dens(nm, std::vector<double>(nt, 0.0));
  const CoefficientProfile free = p.free_wave();
  ModeOptions mo;
  mo.tol = opt.ode_tol;
  mo.period_fraction = 0.1;
  for_each_index(static_cast<long>(nm), policy, [&](long i) {
    const double xi = data.xi[i];
    auto w = wave_operator(p, xi, epsilon_cutoff, tol, opt);
    const double a0 = p.a(0.0);
    const Vec2c U0(h_symbol(p, 0.0, xi, opt.N) * data.u0[i] / std::sqrt(a0),
                   -I1 * data.u1[i] / std::sqrt(a0));
    const Vec2c V0 = w.W_plus * U0;
    const cplx v0 = V0(0) * std::sqrt(a0) / (a0 * xi);
    const cplx v1 = I1 * std::sqrt(a0) * V0(1);
    auto tu = integrate_mode_direct(p, xi, data.u0[i], data.u1[i], t_probe, mo);
    auto tv = integrate_mode_direct(free, xi, v0, v1, t_probe, mo);
    for (std::size_t k = 0; k < nt; ++k) {
      const double t = t_probe[k], a = p.a(t);
      const cplx d1 = a * xi * tv.u[k] - h_symbol(p, t, xi, opt.N) * tu.u[k];
      const cplx d2 = tv.ut[k] - tu.ut[k];
      dens[i][k] = data.weight[i] * (std::norm(d1) + std::norm(d2)) / a;
    }
    c.samples[i] = std::move(w);
  });
  std::vector<double> col(nm);
  for (std::size_t k = 0; k < nt; ++k) {
    for (std::size_t i = 0; i < nm; ++i) col[i] = dens[i][k];
    c.value.push_back(std::sqrt(pairwise_sum(col)));
  }
  return c;
}

double loglog_slope(const std::vector<double>& t, const std::vector<double>& y, double lo,
                    double hi, double* rms) {
  std::vector<double> one, lx, ly;
  for (std::size_t i = 0; i < t.size() && i < y.size(); ++i) {
    if (t[i] < lo || t[i] > hi || !(y[i] > 0.0) || !std::isfinite(y[i])) continue;
    one.push_back(1.0);
    lx.push_back(std::log1p(t[i]));
    ly.push_back(std::log(y[i]));
  }
  if (ly.size() < 3) throw DomainError("loglog_slope: fewer than 3 usable points in the window");
  const auto beta = least_squares({one, lx}, ly, rms);
  return beta[1];
}

}  // namespace kgspec
