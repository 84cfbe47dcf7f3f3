#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "kgspec/classify.hpp"
#include "kgspec/coeffs.hpp"
#include "kgspec/numerics.hpp"
#include "kgspec/parallel.hpp"
#include "kgspec/zones.hpp"

namespace kgspec {

struct ModeOptions {
  double tol = 1e-10;             // local error of the direct integrator
  double period_fraction = 0.1;   // direct step <= fraction * 2 pi / <xi>
  bool z_frame = true;            // use the diagonalized variable when allowed
  double z_N = 10.0;              // enter the Z frame once <xi>/eta >= z_N
  double z_step = 0.02;           // Z-frame step = z_step / eta
  double kappa_max = 0.05;        // |<xi>'| / (4 <xi>^2) bound inside the Z frame
};

/// One Fourier mode sampled at the requested times.
struct ModeTrajectory {
  double xi = 0.0;
  std::vector<double> times;
  std::vector<cplx> u, ut;
  /// Start of the Z-frame segment (infinity when never used).
  double switch_time = 0.0;
  /// Relative U mismatch between the two representations at switch_time.
  double switch_mismatch = 0.0;
  long steps = 0;

  /// U = (i <xi> u, u_t) at sample k.
  Vec2c U(const CoefficientProfile& p, std::size_t k) const;
  /// |U|^2 = <xi>^2 |u|^2 + |u_t|^2 at sample k.
  double U_norm2(const CoefficientProfile& p, std::size_t k) const;
};

/// Integrates u'' + <xi>^2 u = 0 from t = 0 with (u, u_t)(0) = (u0, u1) and
/// samples at `times` (sorted, nonnegative).
ModeTrajectory integrate_mode(const CoefficientProfile& p, double xi, cplx u0, cplx u1,
                              const std::vector<double>& times, const ModeOptions& opt = {});

/// Reference path: direct adaptive integration only, no diagonalization.
ModeTrajectory integrate_mode_direct(const CoefficientProfile& p, double xi, cplx u0, cplx u1,
                                     const std::vector<double>& times, const ModeOptions& opt = {});

/// Real fundamental pair of u'' + <xi>^2 u = 0 started at s:
/// [[y0, y1], [y0', y1']] at t with identity at s.
Mat2 fundamental_real(const CoefficientProfile& p, double xi, double s, double t,
                      const ModeOptions& opt = {});

/// r = |U(t)|^2 <xi>(s) / (|U(s)|^2 <xi>(t)) between samples i_s and i_t.
double two_sided_check(const ModeTrajectory& tr, std::size_t i_s, std::size_t i_t,
                       const CoefficientProfile& p);

struct PseudoZoneState {
  double xi = 0.0;
  double t = 0.0;
  Mat2 E;              // E(t, 0, xi)
  double sup_norm = 0; // sup of ||E(tau, 0, xi)|| over the probe points in [0, t]
  Vec2c V(cplx u, cplx ut, const CoefficientProfile& p, const PsiProfile& psi) const;
};

/// Fundamental solution of the pseudo-zone system for V = (psi eta u, psi u_t - psi' u).
PseudoZoneState pseudo_zone_fundamental(const CoefficientProfile& p, const PsiProfile& psi,
                                        double xi, double t, const ZoneGeometry& g = {},
                                        const ModeOptions& opt = {});

/// Radial spectral measure: frequencies with quadrature weights and data.
struct SpectralMeasure {
  std::vector<double> xi, weight;
  std::vector<cplx> u0, u1;
};

/// Geometric grid in xi with log-spaced trapezoid weights times xi^(n-1) |data|^2 shape.
SpectralMeasure gaussian_measure(double xi_lo, double xi_hi, int count, int n, double width);

/// Low-frequency packet (stays in the pseudo-differential zone over the horizon)
/// mixed with an O(1)-frequency packet.
SpectralMeasure two_packet_measure(int count, double low_hi, double mid_lo, double mid_hi, int n);

std::vector<ModeTrajectory> sweep_modes(const CoefficientProfile& p, const SpectralMeasure& m,
                                        const std::vector<double>& times, const ModeOptions& opt,
                                        ExecutionPolicy policy);

struct EnergySeries {
  std::vector<double> t;
  std::vector<double> E_am;       // 1/2 (|u_t|^2 + a^2|xi|^2|u|^2 + m^2|u|^2)
  std::vector<double> E_eff;      // 1/2 (|u_t|^2 + a^2|xi|^2|u|^2 + m gamma |u|^2)
  std::vector<double> E_p;        // with p = eta psi sqrt(q); empty without psi
  std::vector<double> potential;  // ||u||^2
  std::vector<double> kinetic;    // ||u_t||^2 + a^2 ||grad u||^2
};

/// Weighted sums over modes with a fixed-order reduction.
EnergySeries assemble_energies(const std::vector<ModeTrajectory>& tr, const CoefficientProfile& p,
                               const std::optional<PsiProfile>& psi,
                               const std::vector<double>& weights);

}  // namespace kgspec
