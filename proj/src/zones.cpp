#include "kgspec/zones.hpp"

#include <cmath>
#include <limits>

namespace kgspec {

SymbolValues symbols(const CoefficientProfile& p, double t, double xi, double N) {
  const double a = p.a(t), m = p.m(t), e = p.eta(t);
  return {std::sqrt(xi * xi * a * a + m * m), std::sqrt(xi * xi * a * a + N * N * e * e)};
}

double separating_time(const ZoneGeometry& g, const CoefficientProfile& p, double xi) {
  if (xi < 0.0) throw DomainError("separating_time: |xi| must be nonnegative");
  const double inf = std::numeric_limits<double>::infinity();
  if (g.variant == ZoneVariant::Wavefront) {
    if (xi == 0.0) return inf;
    const double target = g.N / xi;
    if (target <= p.A0()) return 0.0;
    if (p.primitive(g.T_max) < target) return inf;
    return p.primitive_inverse(target, 1e-13);
  }
  auto f = [&](double t) {
    const double A = p.primitive(t), mu = p.mu(t);
    return A * A * xi * xi + mu * mu - g.N * g.N;
  };
  if (f(0.0) >= 0.0) return 0.0;
  double lo = 0.0, hi = 1e-3;
  while (hi <= g.T_max) {
    if (f(hi) >= 0.0) {
      return bisect(f, lo, hi, 1e-13);
    }
    lo = hi;
    hi *= 1.25;
  }
  return inf;
}

bool in_hyperbolic_zone(const ZoneGeometry& g, const CoefficientProfile& p, double t, double xi) {
  if (g.variant == ZoneVariant::Wavefront) return p.primitive(t) * xi >= g.N;
  return p.omega(t, xi) / p.eta(t) >= g.N;
}

Mat2c diag_P() {
  const double r = std::sqrt(0.5);
  Mat2c P;
  P << r, r, -r, r;
  return P;
}

Mat2c diag_P_inv() {
  const double r = std::sqrt(0.5);
  Mat2c P;
  P << r, -r, r, r;
  return P;
}

Mat2c remainder_R2(double w, double w1, double w2, cplx* k_out) {
  const cplx I(0.0, 1.0);
  const cplx k = I * w1 / (4.0 * w * w);
  const cplx k1 = I * (w2 / (4.0 * w * w) - w1 * w1 / (2.0 * w * w * w));
  const cplx beta = w1 * k / (2.0 * w);
  Mat2c J;
  J << 0.0, -1.0, 1.0, 0.0;
  Mat2c S;
  S << beta, 0.0, 0.0, -beta;
  const Mat2c R2 = (Mat2c::Identity() - k * J) * (S - k1 * J) / (1.0 + k * k);
  if (k_out) *k_out = k;
  return R2;
}

Diagonalizer diagonalizer_matrices(const CoefficientProfile& p, double t, double xi, double N,
                                   double min_det) {
  const double w = p.omega(t, xi);
  if (w == 0.0) throw DomainError("diagonalizer: <xi> vanishes");
  const double e = p.eta(t);
  if (w / e < N) {
    throw DomainError("diagonalizer: (t, xi) outside the hyperbolic zone <xi>/eta >= N");
  }
  Diagonalizer d;
  d.R2 = remainder_R2(w, p.omega1(t, xi), p.omega2(t, xi), &d.k);
  Mat2c J;
  J << 0.0, -1.0, 1.0, 0.0;
  d.K = Mat2c::Identity() + d.k * J;
  d.det = (1.0 + d.k * d.k).real();
  if (std::abs(d.det) < min_det) {
    throw DomainError("diagonalizer: det K = " + std::to_string(d.det) +
                      " too small; increase the zone constant N");
  }
  d.K_inv = (Mat2c::Identity() - d.k * J) / (1.0 + d.k * d.k);
  d.R2_scale = e * e / w;
  return d;
}

double phase(const CoefficientProfile& p, double s, double t, double xi, double rel_tol) {
  if (t < s) throw DomainError("phase: need s <= t");
  if (s == t) return 0.0;
  QuadOptions q;
  q.rel_tol = rel_tol;
  return integrate([&](double x) { return p.omega(x, xi); }, s, t, q);
}

Mat2c phase_matrix(const CoefficientProfile& p, double s, double t, double xi) {
  const double ph = phase(p, s, t, xi);
  Mat2c D = Mat2c::Zero();
  D(0, 0) = std::polar(1.0, -ph);
  D(1, 1) = std::polar(1.0, ph);
  return D;
}

}  // namespace kgspec
