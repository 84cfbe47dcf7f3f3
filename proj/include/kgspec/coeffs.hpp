#pragma once

#include <functional>
#include <map>
#include <optional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kgspec/numerics.hpp"

namespace kgspec {

/// A scalar function of time with its first two derivatives.
struct Smooth {
  std::function<double(double)> f, d1, d2;
};

/// Speed law a(t). `A` is the closed-form primitive 1 + int_0^t a when known
/// (or A0 + int_0^t a for scale-invariant speeds).
struct SpeedLaw {
  std::string name;
  Smooth a;
  std::function<double(double)> A;
  double A0 = 1.0;
  std::map<std::string, double> params;
};

/// Mass law m(t); may depend on the speed law (scale-invariant masses do).
struct MassLaw {
  std::string name;
  std::function<Smooth(const SpeedLaw&)> bind;
  std::map<std::string, double> params;
};

// Speed families.
SpeedLaw speed_constant();
SpeedLaw speed_polynomial(double ell);
SpeedLaw speed_exponential();
/// a = (A/A0)^alpha with A(0) = A0; alpha <= 1.
SpeedLaw speed_scale_invariant(double alpha, double A0);
/// a = 2 + sin(e^t).
SpeedLaw speed_oscillating();
/// User expression in t; derivatives by central differences.
SpeedLaw speed_expression(const std::string& expr);

// Mass families.
MassLaw mass_zero();
MassLaw mass_constant(double mu0);
/// m = mu0 (1+t)^k.
MassLaw mass_power(double mu0, double k);
/// m = mu a/A.
MassLaw mass_scale_invariant(double mu);
/// m = mu0 / ((e+t) ln(e+t)^gamma).
MassLaw mass_log(double mu0, double gamma);
/// m = eta (2 + sin t^2): mu oscillates without a limit.
MassLaw mass_oscillating_mu();
MassLaw mass_expression(const std::string& expr);

/// Immutable coefficient pair (a, m) with derivatives, primitive and the
/// derived scales eta = a/A, mu = m/eta. Copies share the primitive memo.
class CoefficientProfile {
 public:
  CoefficientProfile(SpeedLaw speed, MassLaw mass, std::string label = "");

  const std::string& label() const { return label_; }
  const std::string& speed_name() const { return speed_.name; }
  const std::string& mass_name() const { return mass_name_; }
  bool has_closed_primitive() const { return static_cast<bool>(speed_.A); }
  double A0() const { return speed_.A0; }
  std::optional<double> speed_param(const std::string& key) const;
  std::optional<double> mass_param(const std::string& key) const;

  /// Same speed with the mass removed; shares the primitive memo.
  CoefficientProfile free_wave() const;
  const SpeedLaw& speed_law() const { return speed_; }

  double a(double t) const { return speed_.a.f(t); }
  double a1(double t) const { return speed_.a.d1(t); }
  double a2(double t) const { return speed_.a.d2(t); }
  double m(double t) const { return mass_.f(t); }
  double m1(double t) const { return mass_.d1(t); }
  double m2(double t) const { return mass_.d2(t); }

  /// A(t); closed form when available, otherwise memoized adaptive quadrature.
  double primitive(double t) const;
  /// Smallest t with A(t) = y, by bisection on the monotone primitive.
  double primitive_inverse(double y, double tol = 1e-12) const;

  double eta(double t) const { return a(t) / primitive(t); }
  double mu(double t) const { return m(t) * primitive(t) / a(t); }
  std::pair<double, double> eta_mu(double t) const;
  /// mu', mu'' by analytic composition.
  double mu1(double t) const;
  double mu2(double t) const;

  /// <xi>_{a,m}(t) and its first two time derivatives.
  double omega(double t, double xi) const;
  double omega1(double t, double xi) const;
  double omega2(double t, double xi) const;

  /// Problems with the a(0) = 1, m(0) = 1 normalization, one line each.
  std::vector<std::string> normalization_warnings() const;

 private:
  struct Memo;
  std::string label_;
  SpeedLaw speed_;
  Smooth mass_;
  std::string mass_name_;
  std::map<std::string, double> mass_params_;
  std::shared_ptr<Memo> memo_;
};

struct ClauseResult {
  std::string name;
  double constant = 0.0;
  double worst_t = 0.0;
  bool satisfied = false;
  bool heuristic = false;
};

struct HypothesisReport {
  std::string hypothesis;
  std::vector<ClauseResult> clauses;
  std::vector<double> grid;
  std::vector<std::string> notes;
  bool satisfied() const;
};

nlohmann::json to_json(const HypothesisReport& r);

struct HypothesisOptions {
  double cap = 1e3;
  double A_threshold = 1e3;
};

/// Uniform grid helper.
std::vector<double> linear_grid(double lo, double hi, int n);
/// Geometric grid in (1+t).
std::vector<double> geometric_grid(double lo, double hi, int n);

/// |a^(k)|/a <= C_k eta^k, k = 1, 2, plus the heuristic a not in L^1 probe.
HypothesisReport check_hypothesis1(const CoefficientProfile& p,
                                   const std::vector<double>& grid,
                                   const HypothesisOptions& opt = {});
/// |mu^(k)| <= C_k mu eta^k, k = 1, 2.
HypothesisReport check_hypothesis2(const CoefficientProfile& p,
                                   const std::vector<double>& grid,
                                   const HypothesisOptions& opt = {});

/// Central differences with step scaled by (1+t).
double central_d1(const std::function<double(double)>& f, double t, double h_rel = 1e-5);
double central_d2(const std::function<double(double)>& f, double t, double h_rel = 1e-4);

}  // namespace kgspec
