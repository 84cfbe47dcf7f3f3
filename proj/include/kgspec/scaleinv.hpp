#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kgspec/coeffs.hpp"
#include "kgspec/modes.hpp"

namespace kgspec {

/// a'/a = alpha a/A, m = mu a/A, A(0) = A0.
struct ScaleInvariantModel {
  double alpha = 0.0;
  double mu = 0.0;
  double A0 = 1.0;
  double delta = 1.0;  // (alpha - 1)^2 - 4 mu^2
  /// (ell, mu~) when built from a = (1+t)^ell, m = mu~/(1+t).
  std::optional<std::pair<double, double>> equiv_poly;

  static ScaleInvariantModel from_alpha_mu(double alpha, double mu, double A0 = 1.0);
  static ScaleInvariantModel from_polynomial(double ell, double mu_tilde);

  double sigma() const;  // exponent of the secondary transform, see DissipativeForm
  /// Problems with the stored fields, empty when valid.
  std::vector<std::string> check() const;
  /// The (a, m) pair this model describes.
  CoefficientProfile profile() const;
  /// A(t) of the model (A0 + int a).
  double A(double t) const;
};

double compute_delta(double alpha, double mu);
/// ell = alpha / (1 - alpha), mu~ = mu (ell + 1).
std::pair<double, double> polynomial_equivalent(double alpha, double mu);

/// v(tau) = u(t), tau + 1 = A(t):
///   v'' - Lap v + damping/(1+tau) v' + potential/(1+tau)^2 v = 0 from tau0,
/// then either v = (1+tau)^(-alpha/2) w (delta < 0) giving
///   w'' - Lap w + sigma/(1+tau)^2 w = 0,
/// or v = (1+tau)^sigma w (delta >= 0) giving
///   w'' - Lap w + (1 + sqrt delta)/(1+tau) w' = 0.
struct DissipativeForm {
  double damping = 0.0;    // alpha
  double potential = 0.0;  // mu^2
  double tau0 = 0.0;       // A0 - 1
  bool potential_branch = false;  // delta < 0
  double w_exponent = 0.0;        // v = (1+tau)^w_exponent w
  double sigma = 0.0;             // w potential (delta < 0) or v = (1+tau)^sigma w (delta >= 0)
  double w_damping = 0.0;         // 1 + sqrt(delta) when delta >= 0, else 0
  double w_potential = 0.0;       // (1 - delta)/4 when delta < 0, else 0
};

DissipativeForm transform_to_dissipative(const ScaleInvariantModel& m);
nlohmann::json to_json(const DissipativeForm& f);

/// (w, w_tau) at tau0 from (u0, u1).
std::pair<cplx, cplx> transformed_data(const ScaleInvariantModel& m, const DissipativeForm& f,
                                       cplx u0, cplx u1);

/// Integrates the w equation for one frequency and maps back to (u, u_t) at `times`.
ModeTrajectory integrate_transformed_mode(const ScaleInvariantModel& m, double xi, cplx u0,
                                          cplx u1, const std::vector<double>& times,
                                          double tol = 1e-12);

enum class RateScale { OnePlusT, T };
std::string to_string(RateScale s);

/// y(t) <~ A(t)^A_power (ln A(t))^log_power, also expressed as
/// (1+t)^power or e^(power t) according to `scale`.
struct RateExponent {
  double A_power = 0.0;
  double log_power = 0.0;
  RateScale scale = RateScale::OnePlusT;
  double power = 0.0;
};

enum class LqBranch {
  L2,               // q = 2: the main estimates apply
  NonPosDelta,      // delta <= 0, n > q/(2-q)
  NonPosCritical,   // delta <= 0, n = q/(2-q)
  NotCovered,       // delta <= 0, n < q/(2-q)
  PosFast,          // delta > 0, 1 + sqrt(delta) > (2-q)n/q + 2 kappa
  PosCritical,      // equality
  PosSlow,          // 1 + sqrt(delta) < (2-q)n/q + 2 kappa
};
std::string to_string(LqBranch b);

struct LqCase {
  LqBranch branch = LqBranch::L2;
  /// Squared norm: ||u||_{L^2}^2 for delta <= 0, ||u||_{H^kappa}^2 for delta > 0.
  RateExponent rate;
  /// Power of ln A carried by d(t) (critical dimension only).
  double d_log_power = 0.0;
};

struct RatePrediction {
  double q = 2.0, kappa = 0.0;
  int n = 1;
  RateExponent potential;  // ||u||^2
  RateExponent kinetic;    // ||u_t||^2 + a^2 ||grad u||^2
  LqCase lq_case;
};

RatePrediction predict_rates(const ScaleInvariantModel& m, double q, double kappa, int n);
nlohmann::json to_json(const RatePrediction& r);

struct ExponentFit {
  double exponent = 0.0;
  double rms = 0.0;
  double lo = 0.0, hi = 0.0;
  int samples = 0;
};

/// Least squares of ln(y / ln(e+t)^log_power) against ln(1+t) or t on [lo, hi].
ExponentFit fit_exponent(const std::vector<double>& t, const std::vector<double>& y,
                         RateScale scale, double lo, double hi, double log_power = 0.0);

/// Final decade of the horizon: [(1+T)/10 - 1, T] or the last factor 10 of A.
std::pair<double, double> final_decade(const ScaleInvariantModel& m, RateScale scale, double T);

struct RateSimConfig {
  SpectralMeasure data;
  double horizon = 1e3;
  int samples = 120;
  ModeOptions mode;
  double tolerance = 0.05;
  double rms_gate = 0.05;
};

/// Pseudo-zone packet (xi A(T) <= 1e-3) started on the dominant zero-frequency
/// solution plus a packet in [0.5, 2], weighted so each rate has one dominant packet.
SpectralMeasure rate_probe_measure(const ScaleInvariantModel& m, double horizon, int count = 24);

enum class FitStatus { Pass, Fail, Inconclusive };
std::string to_string(FitStatus s);

struct RateCheck {
  std::string quantity;
  double fitted = 0.0, predicted = 0.0;
  ExponentFit fit;
  FitStatus status = FitStatus::Inconclusive;
};

struct RateReport {
  RateCheck potential, kinetic;
  std::vector<std::string> notes;
  bool passed() const;
};

RateReport verify_rates(const ScaleInvariantModel& m, const RatePrediction& pred,
                        const RateSimConfig& cfg,
                        ExecutionPolicy policy = ExecutionPolicy::Parallel);
nlohmann::json to_json(const RateReport& r);

}  // namespace kgspec
