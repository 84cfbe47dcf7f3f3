#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgspec/coeffs.hpp"

namespace kgspec {

enum class Kind { Scattering, NonEffective, Effective, GreyZone, Undetermined };
enum class MuLimit { ToZero, ToInfinity, Finite, Undetermined };

std::string to_string(Kind k);
std::string to_string(MuLimit m);

/// Fit of ln f = c + p ln t + q ln ln t over a window of geometric samples.
struct TailFit {
  double c = 0.0, p = 0.0, q = 0.0;
  double rms = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  /// True when p fell in the dead band and q was refitted with p pinned.
  bool pinned = false;
};

/// Samples f on [t_lo, t_hi] geometrically and fits the log model. With
/// `pin_p` set, p is fixed to that value and only (c, q) are fitted.
TailFit fit_tail(const std::function<double(double)>& f, double t_lo, double t_hi,
                 int samples = 64);
TailFit fit_tail_pinned(const std::function<double(double)>& f, double t_lo, double t_hi,
                        double p, int samples = 64);

enum class Integrability { Integrable, Divergent, Undetermined };

struct IntegrabilityVerdict {
  Integrability verdict = Integrability::Undetermined;
  TailFit fit;
  bool heuristic = false;
};

/// Tail-exponent integrability test: threshold -1 with a dead band of width
/// `band`; inside the band the log exponent q decides (integrable iff q < -1).
IntegrabilityVerdict integrability(const std::function<double(double)>& f, double T,
                                   double tol, double band = 0.05);

/// int_T^inf f extrapolated from a tail fit; +inf when not integrable.
double tail_integral(const IntegrabilityVerdict& v, const std::function<double(double)>& f,
                     double T);

struct Classification {
  Kind kind = Kind::Undetermined;
  double T_max = 0.0;
  double scattering_integral = 0.0;  // int_0^T (A/a) m^2
  IntegrabilityVerdict scattering;
  MuLimit mu_limit = MuLimit::Undetermined;
  double mu_value = 0.0;  // mu(T_max)
  TailFit mu_fit;
  bool integral_converged = true;
  bool mu_heuristic = false;
  std::vector<std::string> notes;
};

nlohmann::json to_json(const Classification& c);

/// Class of (a, m) probed on [0, T_max]. `tol` gates the RMS
/// residual of the log fits; a failed gate withholds the kind.
Classification classify(const CoefficientProfile& p, double T_max, double tol = 0.05);

enum class PsiProvenance { ClosedFormFamily, ScaleInvariantExponent, UserSupplied };
std::string to_string(PsiProvenance p);

struct PsiProfile {
  Smooth psi;
  PsiProvenance provenance = PsiProvenance::UserSupplied;
  std::string description;
};

/// psi of Hypothesis 3 for the recognized families; throws DomainError otherwise.
PsiProfile build_psi(const CoefficientProfile& p);
PsiProfile user_psi(Smooth psi, std::string description = "user");

struct Hypothesis3Options {
  double cap = 1e3;
};

/// Both summands of the Hypothesis-3 bound, |psi'|/psi < c eta with c < 1,
/// and eventual monotonicity of 1/(eta psi^2).
HypothesisReport check_hypothesis3(const CoefficientProfile& p, const PsiProfile& psi,
                                   const std::vector<double>& grid,
                                   const Hypothesis3Options& opt = {});

}  // namespace kgspec
