#pragma once

#include "kgspec/coeffs.hpp"
#include "kgspec/numerics.hpp"

namespace kgspec {

enum class ZoneVariant { Effective, Wavefront };

/// Split of the extended phase space. Effective: <xi>/eta >= N is
/// hyperbolic. Wavefront: A(t)|xi| >= N is hyperbolic.
struct ZoneGeometry {
  double N = 10.0;
  ZoneVariant variant = ZoneVariant::Wavefront;
  double T_max = 1e12;
};

struct SymbolValues {
  double xi_bracket;  // (|xi|^2 a^2 + m^2)^(1/2)
  double h;           // (|xi|^2 a^2 + N^2 eta^2)^(1/2)
};

SymbolValues symbols(const CoefficientProfile& p, double t, double xi, double N);

/// theta_|xi|; +infinity when the curve is never crossed below T_max.
double separating_time(const ZoneGeometry& g, const CoefficientProfile& p, double xi);

bool in_hyperbolic_zone(const ZoneGeometry& g, const CoefficientProfile& p, double t, double xi);

/// The constant change of basis P and its inverse.
Mat2c diag_P();
Mat2c diag_P_inv();

struct Diagonalizer {
  Mat2c K, K_inv;
  cplx k;           // K = I + k J, J = [[0,-1],[1,0]]
  double det;       // det K = 1 + k^2
  double R2_scale;  // eta^2 / <xi>
  Mat2c R2;         // exact remainder after the refined step
};

/// Refined diagonalizer at (t, xi). Throws when |det K| < min_det.
Diagonalizer diagonalizer_matrices(const CoefficientProfile& p, double t, double xi, double N,
                                   double min_det = 0.5);

/// R2 only, from omega and its derivatives; no zone checks.
Mat2c remainder_R2(double w, double w1, double w2, cplx* k_out = nullptr);

/// phi(s, t) = int_s^t <xi> by adaptive quadrature.
double phase(const CoefficientProfile& p, double s, double t, double xi, double rel_tol = 1e-12);

/// diag(exp(-i phi), exp(i phi)).
Mat2c phase_matrix(const CoefficientProfile& p, double s, double t, double xi);

}  // namespace kgspec
