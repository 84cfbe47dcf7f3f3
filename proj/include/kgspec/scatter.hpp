#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgspec/classify.hpp"
#include "kgspec/coeffs.hpp"
#include "kgspec/modes.hpp"
#include "kgspec/numerics.hpp"

namespace kgspec {

enum class FundamentalKind { PseudoE, FreeWaveEa, PerturbationQ, ComposedEam };
std::string to_string(FundamentalKind k);

/// Matrix function sampled at `t`, anchored at `s` (value I there).
struct FundamentalSolution {
  FundamentalKind kind = FundamentalKind::FreeWaveEa;
  double s = 0.0;
  double xi = 0.0;
  std::vector<double> t;
  std::vector<Mat2c> value;
};

struct ScatterOptions {
  double N = 10.0;                // zone constant of h and theta
  double ode_tol = 1e-12;
  double period_fraction = 0.05;  // step <= fraction * pi / (a |xi|)
  bool test_mode = false;         // admit a' = 0 (constant speed oracle)
  double horizon = 1e4;           // ladder runs at least this far
  double t_cap = 1e8;             // give up beyond this
  double ladder_ratio = 1.189207115002721;  // 2^(1/4) in (1+t)
};

/// h(t, xi) = (|xi|^2 a^2 + N^2 eta^2)^(1/2).
double h_symbol(const CoefficientProfile& p, double t, double xi, double N);
/// diag(h / (|xi| a), 1).
Mat2c H_matrix(const CoefficientProfile& p, double t, double xi, double N);
/// M = [[1, -1], [1, 1]] and its inverse.
Mat2c M_matrix();
Mat2c M_inv();
/// R_a and R_{a,m} in the D_t convention (D_t = -i d/dt).
Mat2c R_a(const CoefficientProfile& p, double t);
Mat2c R_am(const CoefficientProfile& p, double t, double xi);

/// E_a(t, s, xi) for (D_t - D - R_a) E_a = 0 at the given times (>= s).
/// Requires (s, xi) hyperbolic and a' > 0 unless opt.test_mode.
FundamentalSolution free_wave_fundamental(const CoefficientProfile& p, double s,
                                          const std::vector<double>& times, double xi,
                                          const ScatterOptions& opt = {});

/// Fundamental solution of D_t U = A~ U for U = a^(-1/2) (h u, D_t u) from 0.
Mat2c pseudo_fundamental(const CoefficientProfile& p, double t, double xi,
                         const ScatterOptions& opt = {});

struct PeanoBakerResult {
  Mat2c Q;                  // truncated series at the right end point
  int terms = 0;
  double norm_integral = 0; // int ||P||
  double bound = 0;         // (int ||P||)^(K+1)/(K+1)! exp(int ||P||)
  double rounding = 0;      // floating-point allowance, nodes * eps * exp(int ||P||)
  std::vector<double> term_norms;
};

/// Q = I + sum_{k <= K} i^k int P(t1) int P(t2) ... on [s, t] by Chebyshev
/// cumulative integration on `nodes` points. Throws when bound > tol.
PeanoBakerResult peano_baker(const std::function<Mat2c(double)>& P, double s, double t, int K,
                             double tol = std::numeric_limits<double>::infinity(),
                             int nodes = 64);

struct WaveOperatorSample {
  double xi = 0.0;
  double theta = 0.0;           // s = theta_|xi|
  Mat2c Q_limit;                // Q_{a,m}(inf, theta, xi)
  Mat2c W_plus;                 // multiplier in the a^(-1/2)(h u, D_t u) frame
  std::vector<double> t;
  std::vector<double> q_residual;           // ||Q(t) - Q_limit||
  std::vector<double> multiplier_residual;  // ||S1^-1 S(t) - W_plus||
  std::vector<double> bound;                // int_t^inf (A/a) m^2
  double last_increment = 0.0;
  double converged_at = 0.0;
  /// sup ||P|| / ||R_am|| and sup ||R_am|| / ((A/a) m^2) along the ladder.
  double P_over_R = 0.0, R_over_bound = 0.0;
  /// sup ||Q|| / exp(int ||P||) along the ladder.
  double Q_over_exp = 0.0;
  /// sup of h/(|xi| a) and its deviation from 1 at the last ladder point.
  double H_sup = 0.0, H_last_dev = 0.0;
  std::vector<std::string> notes;
};

nlohmann::json to_json(const WaveOperatorSample& w);

/// sup over the grid of sqrt(a) int_0^t sqrt(a) / A.
ClauseResult check_additional_scattering(const CoefficientProfile& p,
                                         const std::vector<double>& grid, double cap = 1e3);

/// int_t^inf (A/a) m^2 by quadrature to T_end plus tail extrapolation.
std::vector<double> scattering_tail(const CoefficientProfile& p, const std::vector<double>& t,
                                    double T_end);

WaveOperatorSample wave_operator(const CoefficientProfile& p, double xi, double epsilon_cutoff,
                                 double tol, const ScatterOptions& opt = {});

struct DiscrepancyCurve {
  std::vector<double> t;
  std::vector<double> value;  // a^(-1/2) ||(a grad v, v_t) - (<D> u, u_t)||
  std::vector<WaveOperatorSample> samples;
};

/// Mode-wise comparison of u with the free wave v whose data is W_+ applied to u's data.
DiscrepancyCurve asymptotic_equivalence(const CoefficientProfile& p, const SpectralMeasure& data,
                                        double epsilon_cutoff, const std::vector<double>& t_probe,
                                        double tol, const ScatterOptions& opt = {},
                                        ExecutionPolicy policy = ExecutionPolicy::Parallel);

/// Slope of log y against log(1+t) by least squares over [lo, hi].
double loglog_slope(const std::vector<double>& t, const std::vector<double>& y, double lo,
                    double hi, double* rms = nullptr);

}  // namespace kgspec
