#include "kgspec/modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kgspec/ode.hpp"

namespace kgspec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct R2Sample {
  double w;
  Mat2c R;
};

R2Sample r2_at(const CoefficientProfile& p, double t, double xi) {
  const double w = p.omega(t, xi);
  return {w, remainder_R2(w, p.omega1(t, xi), p.omega2(t, xi))};
}

double kappa(const CoefficientProfile& p, double t, double xi) {
  const double w = p.omega(t, xi);
  return std::abs(p.omega1(t, xi)) / (4.0 * w * w);
}

// Phase increment over [lo, hi] by 4-point Gauss-Legendre; the step is a small
// fraction of the coefficient time scale so this is at rounding level.
double phase_step(const CoefficientProfile& p, double lo, double hi, double xi) {
  static const double x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                              0.8611363115940526};
  static const double w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                              0.3478548451374538};
  const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += w[i] * p.omega(c + r * x[i], xi);
  return s * r;
}

// int_0^D g(x) e^{2ix} dx with g the quadratic through (0, g0), (xm, gm), (D, g1).
cplx filon(cplx g0, cplx gm, cplx g1, double xm, double D) {
  const cplx I(0.0, 1.0);
  const cplx d1 = (gm - g0) / xm;
  const cplx d2 = ((g1 - gm) / (D - xm) - d1) / D;
  const cplx c0 = g0, c1 = d1 - d2 * xm, c2 = d2;
  const cplx e = std::exp(2.0 * I * D);
  const cplx M0 = (e - 1.0) / (2.0 * I);
  const cplx M1 = (D * e - M0) / (2.0 * I);
  const cplx M2 = (D * D * e - 2.0 * M1) / (2.0 * I);
  return c0 * M0 + c1 * M1 + c2 * M2;
}

struct ZFrame {
  Vec2c Z;
  double w_s = 1.0; // <xi> at entry
  double phi = 0.0; // accumulated phase mod 2 pi
};

Vec2c U_from_u(const CoefficientProfile& p, double t, double xi, cplx u, cplx ut) {
  return Vec2c(cplx(0.0, 1.0) * p.omega(t, xi) * u, ut);
}

ZFrame enter_z(const CoefficientProfile& p, double t, double xi, cplx u, cplx ut) {
  const Vec2c U = U_from_u(p, t, xi, u, ut);
  const double w = p.omega(t, xi);
  const cplx k = cplx(0.0, 1.0) * p.omega1(t, xi) / (4.0 * w * w);
  Mat2c J;
  J << 0.0, -1.0, 1.0, 0.0;
  const Mat2c K_inv = (Mat2c::Identity() - k * J) / (1.0 + k * k);
  ZFrame z;
  z.Z = K_inv * (diag_P_inv() * U);
  z.w_s = w;
  z.phi = 0.0;
  return z;
}

std::pair<cplx, cplx> leave_z(const CoefficientProfile& p, double t, double xi, const ZFrame& z) {
  const double w = p.omega(t, xi);
  const cplx k = cplx(0.0, 1.0) * p.omega1(t, xi) / (4.0 * w * w);
  Mat2c J;
  J << 0.0, -1.0, 1.0, 0.0;
  const Mat2c K = Mat2c::Identity() + k * J;
  const double amp = std::sqrt(w / z.w_s);
  Vec2c W(amp * std::polar(1.0, -z.phi) * z.Z(0), amp * std::polar(1.0, z.phi) * z.Z(1));
  const Vec2c U = diag_P() * (K * W);
  return {U(0) / (cplx(0.0, 1.0) * w), U(1)};
}

// One first-order Magnus step of Z' = R3 Z on [t0, t1].
void z_step(const CoefficientProfile& p, double xi, double t0, double t1, ZFrame& z) {
  const double tm = 0.5 * (t0 + t1);
  const R2Sample s0 = r2_at(p, t0, xi), sm = r2_at(p, tm, xi), s1 = r2_at(p, t1, xi);
  const double h = t1 - t0;
  const double xm = phase_step(p, t0, tm, xi);
  const double D = xm + phase_step(p, tm, t1, xi);
  Mat2c Om;
  // Diagonal: Simpson in t.
  Om(0, 0) = h / 6.0 * (s0.R(0, 0) + 4.0 * sm.R(0, 0) + s1.R(0, 0));
  Om(1, 1) = h / 6.0 * (s0.R(1, 1) + 4.0 * sm.R(1, 1) + s1.R(1, 1));
  const cplx I(0.0, 1.0);
  if (D > 0.5) {
    // Off-diagonal: Filon in the phase variable, dt = dphi / <xi>.
    const cplx e0 = std::polar(1.0, 2.0 * z.phi);
    Om(0, 1) = e0 * filon(s0.R(0, 1) / s0.w, sm.R(0, 1) / sm.w, s1.R(0, 1) / s1.w, xm, D);
    Om(1, 0) = std::conj(e0) * std::conj(filon(std::conj(s0.R(1, 0)) / s0.w,
                                               std::conj(sm.R(1, 0)) / sm.w,
                                               std::conj(s1.R(1, 0)) / s1.w, xm, D));
  } else {
    const cplx em = std::polar(1.0, 2.0 * (z.phi + xm));
    const cplx e1 = std::polar(1.0, 2.0 * (z.phi + D));
    const cplx e0 = std::polar(1.0, 2.0 * z.phi);
    Om(0, 1) = h / 6.0 * (s0.R(0, 1) * e0 + 4.0 * sm.R(0, 1) * em + s1.R(0, 1) * e1);
    Om(1, 0) = h / 6.0 *
               (s0.R(1, 0) * std::conj(e0) + 4.0 * sm.R(1, 0) * std::conj(em) +
                s1.R(1, 0) * std::conj(e1));
  }
  z.Z = expm2(Om) * z.Z;
  z.phi = std::remainder(z.phi + D, kTwoPi);
}

bool z_allowed(const CoefficientProfile& p, double t, double xi, double N, double kmax) {
  const double w = p.omega(t, xi);
  if (!(w > 0.0)) return false;
  return w / p.eta(t) >= N && kappa(p, t, xi) <= kmax;
}

using State4 = std::array<double, 4>;

struct DirectStepper {
  const CoefficientProfile& p;
  double xi;
  double period_fraction;
  AdaptiveIntegrator<4> ode;

  DirectStepper(const CoefficientProfile& prof, double x, const ModeOptions& opt)
      : p(prof), xi(x), period_fraction(opt.period_fraction),
        ode(OdeOptions{opt.tol, opt.tol * 1e-2}) {}

  void advance(State4& y, double& t, double t_end) {
    auto rhs = [this](const State4& s, State4& d, double tt) {
      const double w = p.omega(tt, xi);
      const double w2 = w * w;
      d[0] = s[2];
      d[1] = s[3];
      d[2] = -w2 * s[0];
      d[3] = -w2 * s[1];
    };
    auto cap = [this](double tt) {
      const double w = p.omega(tt, xi);
      const double c1 = w > 0.0 ? period_fraction * kTwoPi / w
                                : std::numeric_limits<double>::infinity();
      return std::min(c1, 0.5 / p.eta(tt));
    };
    ode.advance(rhs, y, t, t_end, cap);
  }
};

ModeTrajectory integrate_from(const CoefficientProfile& p, double xi, double s, cplx u0, cplx u1,
                              const std::vector<double>& times, const ModeOptions& opt,
                              bool allow_z) {
  if (xi < 0.0) throw DomainError("integrate_mode: |xi| must be nonnegative");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < s || (i > 0 && times[i] < times[i - 1])) {
      throw DomainError("integrate_mode: sample times must be sorted and >= start");
    }
  }
  ModeTrajectory tr;
  tr.xi = xi;
  tr.times = times;
  tr.u.reserve(times.size());
  tr.ut.reserve(times.size());
  tr.switch_time = std::numeric_limits<double>::infinity();

  DirectStepper direct(p, xi, opt);
  State4 y{u0.real(), u0.imag(), u1.real(), u1.imag()};
  double t = s;
  bool in_z = false;
  bool z_recorded = false;
  ZFrame z;
  long z_steps = 0;
  const bool use_z = allow_z && opt.z_frame && xi > 0.0;

  auto current = [&]() -> std::pair<cplx, cplx> {
    if (in_z) return leave_z(p, t, xi, z);
    return {cplx(y[0], y[1]), cplx(y[2], y[3])};
  };

  for (double target : times) {
    while (t < target) {
      if (!in_z) {
        if (use_z && z_allowed(p, t, xi, opt.z_N, opt.kappa_max)) {
          const cplx u(y[0], y[1]), ut(y[2], y[3]);
          z = enter_z(p, t, xi, u, ut);
          in_z = true;
          if (!z_recorded) {
            // Cross-check one Z step against the direct integrator.
            const double h = opt.z_step / p.eta(t);
            ZFrame zc = z;
            z_step(p, xi, t, t + h, zc);
            const auto [uz, utz] = leave_z(p, t + h, xi, zc);
            State4 yc = y;
            double tc = t;
            DirectStepper probe(p, xi, opt);
            probe.advance(yc, tc, t + h);
            const double w = p.omega(t + h, xi);
            const Vec2c Ud(cplx(0.0, 1.0) * w * cplx(yc[0], yc[1]), cplx(yc[2], yc[3]));
            const Vec2c Uz(cplx(0.0, 1.0) * w * uz, utz);
            tr.switch_time = t;
            tr.switch_mismatch = (Ud - Uz).norm() / std::max(Ud.norm(), 1e-300);
            z_recorded = true;
          }
          continue;
        }
        const double chunk = use_z ? 1.0 / p.eta(t) : target - t;
        direct.advance(y, t, std::min(target, t + chunk));
      } else {
        const double t1 = std::min(target, t + opt.z_step / p.eta(t));
        z_step(p, xi, t, t1, z);
        t = t1;
        ++z_steps;
        if (!z_allowed(p, t, xi, 0.5 * opt.z_N, 2.0 * opt.kappa_max)) {
          const auto [u, ut] = leave_z(p, t, xi, z);
          y = {u.real(), u.imag(), ut.real(), ut.imag()};
          in_z = false;
        }
      }
    }
    const auto [u, ut] = current();
    if (!std::isfinite(std::abs(u)) || !std::isfinite(std::abs(ut))) {
      throw NumericalError("integrate_mode: non-finite state at t = " + std::to_string(t));
    }
    tr.u.push_back(u);
    tr.ut.push_back(ut);
  }
  tr.steps = direct.ode.steps() + z_steps;
  return tr;
}

}  // namespace

Vec2c ModeTrajectory::U(const CoefficientProfile& p, std::size_t k) const {
  return U_from_u(p, times.at(k), xi, u.at(k), ut.at(k));
}

double ModeTrajectory::U_norm2(const CoefficientProfile& p, std::size_t k) const {
  const double w = p.omega(times.at(k), xi);
  return w * w * std::norm(u.at(k)) + std::norm(ut.at(k));
}

ModeTrajectory integrate_mode(const CoefficientProfile& p, double xi, cplx u0, cplx u1,
                              const std::vector<double>& times, const ModeOptions& opt) {
  return integrate_from(p, xi, 0.0, u0, u1, times, opt, true);
}

ModeTrajectory integrate_mode_direct(const CoefficientProfile& p, double xi, cplx u0, cplx u1,
                                     const std::vector<double>& times, const ModeOptions& opt) {
  return integrate_from(p, xi, 0.0, u0, u1, times, opt, false);
}

Mat2 fundamental_real(const CoefficientProfile& p, double xi, double s, double t,
                      const ModeOptions& opt) {
  // The equation is real, so u = y0 + i y1 with u(s) = 1, u_t(s) = i carries both columns.
  auto tr = integrate_from(p, xi, s, cplx(1.0, 0.0), cplx(0.0, 1.0), {t}, opt, true);
  Mat2 M;
  M << tr.u[0].real(), tr.u[0].imag(), tr.ut[0].real(), tr.ut[0].imag();
  return M;
}

double two_sided_check(const ModeTrajectory& tr, std::size_t i_s, std::size_t i_t,
                       const CoefficientProfile& p) {
  const double ws = p.omega(tr.times.at(i_s), tr.xi), wt = p.omega(tr.times.at(i_t), tr.xi);
  return tr.U_norm2(p, i_t) * ws / (tr.U_norm2(p, i_s) * wt);
}

Vec2c PseudoZoneState::V(cplx u, cplx ut, const CoefficientProfile& p,
                         const PsiProfile& psi) const {
  const double ps = psi.psi.f(t);
  return Vec2c(ps * p.eta(t) * u, ps * ut - psi.psi.d1(t) * u);
}

PseudoZoneState pseudo_zone_fundamental(const CoefficientProfile& p, const PsiProfile& psi,
                                        double xi, double t, const ZoneGeometry& g,
                                        const ModeOptions& opt) {
  const double theta = separating_time(g, p, xi);
  if (t > theta * (1.0 + 1e-12)) {
    throw DomainError("pseudo_zone_fundamental: t = " + std::to_string(t) +
                      " lies beyond the separating time " + std::to_string(theta));
  }
  // Columns of E packed as (E11, E21, E12, E22).
  State4 y{1.0, 0.0, 0.0, 1.0};
  auto rhs = [&](const State4& s, State4& d, double tt) {
    const double a = p.a(tt), e = p.eta(tt), w = p.omega(tt, xi);
    const double ps = psi.psi.f(tt);
    const double A11 = p.a1(tt) / a - e + 2.0 * psi.psi.d1(tt) / ps;
    const double A21 = -(psi.psi.d2(tt) / ps + w * w) / e;
    for (int c = 0; c < 2; ++c) {
      const double v1 = s[2 * c], v2 = s[2 * c + 1];
      d[2 * c] = A11 * v1 + e * v2;
      d[2 * c + 1] = A21 * v1;
    }
  };
  auto cap = [&](double tt) {
    const double w = p.omega(tt, xi);
    const double c1 = w > 0.0 ? opt.period_fraction * kTwoPi / w
                              : std::numeric_limits<double>::infinity();
    return std::min(c1, 0.25 / p.eta(tt));
  };
  AdaptiveIntegrator<4> ode(OdeOptions{opt.tol, opt.tol * 1e-2});
  PseudoZoneState st;
  st.xi = xi;
  double tt = 0.0;
  auto mat = [&]() {
    Mat2 E;
    E << y[0], y[2], y[1], y[3];
    return E;
  };
  st.sup_norm = 1.0;
  while (tt < t) {
    const double t_end = std::min(t, tt + 0.25 / p.eta(tt));
    ode.advance(rhs, y, tt, t_end, cap);
    st.sup_norm = std::max(st.sup_norm, opnorm(mat()));
  }
  st.t = t;
  st.E = mat();
  return st;
}

SpectralMeasure gaussian_measure(double xi_lo, double xi_hi, int count, int n, double width) {
  if (!(xi_lo > 0.0 && xi_hi > xi_lo) || count < 2 || n < 1 || !(width > 0.0)) {
    throw DomainError("gaussian_measure: need 0 < xi_lo < xi_hi, count >= 2, n >= 1, width > 0");
  }
  SpectralMeasure m;
  const double r = std::log(xi_hi / xi_lo) / (count - 1);
  for (int i = 0; i < count; ++i) {
    const double xi = xi_lo * std::exp(r * i);
    const double trap = (i == 0 || i == count - 1) ? 0.5 : 1.0;
    m.xi.push_back(xi);
    m.weight.push_back(trap * r * std::pow(xi, n));  // d xi = xi d(ln xi)
    const double amp = std::exp(-0.5 * (xi / width) * (xi / width));
    m.u0.emplace_back(amp, 0.0);
    m.u1.emplace_back(0.0, 0.0);
  }
  return m;
}

SpectralMeasure two_packet_measure(int count, double low_hi, double mid_lo, double mid_hi, int n) {
  if (count < 4 || !(low_hi > 0.0 && mid_lo > low_hi && mid_hi > mid_lo) || n < 1) {
    throw DomainError("two_packet_measure: need count >= 4 and 0 < low_hi < mid_lo < mid_hi");
  }
  const int half = count / 2;
  auto low = gaussian_measure(1e-2 * low_hi, low_hi, half, n, 1e300);
  auto mid = gaussian_measure(mid_lo, mid_hi, count - half, n, 1e300);
  SpectralMeasure m = low;
  for (std::size_t i = 0; i < mid.xi.size(); ++i) {
    m.xi.push_back(mid.xi[i]);
    m.weight.push_back(mid.weight[i]);
    m.u0.push_back(mid.u0[i]);
    m.u1.push_back(mid.u1[i]);
  }
  return m;
}

std::vector<ModeTrajectory> sweep_modes(const CoefficientProfile& p, const SpectralMeasure& m,
                                        const std::vector<double>& times, const ModeOptions& opt,
                                        ExecutionPolicy policy) {
  std::vector<ModeTrajectory> out(m.xi.size());
  for_each_index(static_cast<long>(m.xi.size()), policy, [&](long i) {
    out[i] = integrate_mode(p, m.xi[i], m.u0[i], m.u1[i], times, opt);
  });
  return out;
}

EnergySeries assemble_energies(const std::vector<ModeTrajectory>& tr, const CoefficientProfile& p,
                               const std::optional<PsiProfile>& psi,
                               const std::vector<double>& weights) {
  if (tr.size() != weights.size()) throw DomainError("assemble_energies: weight count mismatch");
  EnergySeries e;
  if (tr.empty()) return e;
  e.t = tr.front().times;
  const std::size_t nt = e.t.size();
  std::vector<double> a(tr.size()), b(tr.size()), c(tr.size()), d(tr.size()), f(tr.size());
  for (std::size_t k = 0; k < nt; ++k) {
    const double t = e.t[k];
    const double am = p.a(t), mm = p.m(t);
    const double gam = std::max(am, mm);
    double pp = 0.0;
    if (psi) {
      const double ps = psi->psi.f(t);
      const double q = std::max(am, 1.0 / (ps * ps));
      pp = p.eta(t) * ps * std::sqrt(q);
    }
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const auto& r = tr[i];
      const double w = weights[i];
      const double u2 = std::norm(r.u[k]), ut2 = std::norm(r.ut[k]);
      const double grad = am * am * r.xi * r.xi * u2;
      a[i] = 0.5 * w * (ut2 + grad + mm * mm * u2);
      b[i] = 0.5 * w * (ut2 + grad + mm * gam * u2);
      c[i] = 0.5 * w * (ut2 + grad + pp * pp * u2);
      d[i] = w * u2;
      f[i] = w * (ut2 + grad);
    }
    e.E_am.push_back(pairwise_sum(a));
    e.E_eff.push_back(pairwise_sum(b));
    if (psi) e.E_p.push_back(pairwise_sum(c));
    e.potential.push_back(pairwise_sum(d));
    e.kinetic.push_back(pairwise_sum(f));
  }
  return e;
}

}  // namespace kgspec
