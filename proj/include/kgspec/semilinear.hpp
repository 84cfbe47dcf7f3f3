#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "kgspec/numerics.hpp"
#include "kgspec/parallel.hpp"
#include "kgspec/spectral_field.hpp"

namespace kgspec {

/// Solutions of u'' + (e^(2t) |xi|^2 + m^2) u = 0 at t with data (1, 0) (K0)
/// and (0, 1) (K1) at s, with their time derivatives.
struct KernelValues {
  double K0 = 1.0, K0_t = 0.0, K1 = 0.0, K1_t = 1.0;
};

/// Cached by (m, s, t, |xi|); computed by the mode integrator on a = e^t.
KernelValues linear_kernels(double m, double s, double t, double xi_norm);
/// Same for all t in `times` (>= s) with one integration; fills the cache.
std::vector<KernelValues> linear_kernel_series(double m, double s,
                                               const std::vector<double>& times,
                                               double xi_norm);
std::size_t kernel_cache_size();
void clear_kernel_cache();

/// Phi(t + h, t) of the first-order system for (u, u_t), fourth-order Magnus
/// with substeps so that omega * substep <= max_phase.
Mat2 step_propagator(double m, double k2, double t, double h, double max_phase = 0.1);

/// d(t,s) of the parameter-dependent estimate: (t-s)^((2-q)/(2q)) when n = q/(2-q), else 1.
double d_kernel(int n, double q, double t, double s);
/// d(t) of the X-norm: 1 for n >= 2, max(1, t^(1/2)) for n = 1.
double d_xnorm(int n, double t);

struct KernelBoundRow {
  double s = 0, t = 0;
  double energy_lhs = 0, energy_rhs = 0;  // ||K1_t f|| + e^t ||grad K1 f|| vs e^((t-s)/2) ||f||_2
  double l2_lhs = 0, l2_rhs = 0;          // ||K1 f|| vs e^((s-t)/2) d(t,s) ||f||_{L2 cap Lq}
  double d = 1.0;
  double energy_ratio() const;
  double l2_ratio() const;
  double l2_ratio_without_d() const;
};

struct KernelBoundReport {
  int n = 2;
  double q = 1.0, m = 1.0, sigma = 1.0;
  int xi_count = 0;
  bool critical = false;  // n = q/(2-q)
  double sup_energy = 0, sup_l2 = 0, sup_l2_without_d = 0;
  std::vector<KernelBoundRow> rows;
};

/// Radial spectral quadrature on R^n for the Gaussian f = exp(-|x|^2 / (2 sigma^2)):
/// sup of both ratios over pairs t >= s from the grids (t = s skipped).
KernelBoundReport check_kernel_bounds(double m, const std::vector<double>& s_grid,
                                      const std::vector<double>& t_grid, double q, int n,
                                      int xi_count = 400, double sigma = 1.0,
                                      ExecutionPolicy policy = ExecutionPolicy::Parallel);
nlohmann::json to_json(const KernelBoundReport& r);

/// t -> e^(t/2) (d(t)^-1 ||u|| + ||grad u|| + e^-t ||u_t||) with its running sup.
struct XNormLedger {
  std::vector<double> t, samples, sup_so_far;
  void add(double time, double value);
  double sup() const { return sup_so_far.empty() ? 0.0 : sup_so_far.back(); }
  /// Running sup at the last sample with time <= `time`.
  double sup_until(double time) const;
};

double x_weighted(int n, double t, double u_l2, double grad_l2, double ut_l2);

class SmallnessViolated : public NumericalError {
 public:
  SmallnessViolated(double time, const std::string& what)
      : NumericalError(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Real Gaussian exp(-|x|^2 / (2 sigma^2)) times amplitudes for u0 and u1.
/// `mean_free` removes the zero mode (the torus keeps it from decaying).
SpectralField gaussian_data(const Grid& g, double sigma, double u0_amp, double u1_amp,
                            bool mean_free = false);
/// (||u0||_1^2 + ||u0||_{H^1}^2 + ||u1||_1^2 + ||u1||_2^2)^(1/2), L^1 by Riemann sum.
double d1_norm(const SpectralField& f);
void scale_to_d1(SpectralField& f, double target);
/// Grid of M points per axis resolving a Gaussian of width sigma: dx = pi sigma / 6.5.
Grid resolving_grid(int n, int M, double sigma);

struct SemilinearOptions {
  double p = 2.0;
  double m = 1.0;
  double horizon = 8.0;
  double tol = 1e-10;            // Picard residual relative to the X-norm
  int max_picard = 30;
  double step_phase = 0.3;       // h omega(k_cut) <= step_phase
  double max_step = 0.05;
  double magnus_phase = 0.05;
  double pad_factor = 0.0;       // 0 selects p/2 + 1
  bool nonlinear = true;
  double smallness_factor = 1e3; // ledger sup above this times the data norm aborts
  double alias_tol = 1e-4;       // squared-norm fraction of |u|^p outside the band
  std::vector<double> gn_times;  // Gagliardo-Nirenberg checks near these times
  double gn_bound = 10.0;
};

struct GNCheck {
  double t = 0;
  int k = 1;
  double theta = 0;
  double constant = 0;  // ||u||_{kp}^p / (||u||^(p(1-theta)) ||grad u||^(p theta))
  bool ok = false;
};

struct SemilinearResult {
  std::vector<double> t, u_l2, grad_l2, ut_l2;
  XNormLedger ledger;
  double data_norm = 0;
  double picard_residual = 0;     // sup_t ||Pu - u||_X-weighted / ||u||_X
  int picard_iterations_max = 0;
  double alias_tail_max = 0;
  long steps = 0;
  int padded_M = 0;
  double k_cut = 0;
  /// sup e^(-t/2)(||u_t|| + e^t ||grad u||) / (||u0||_{H^1} + ||u1||_2) and
  /// sup e^(t/2) ||u|| / (d(t) ||(u0,u1)||_{D_1}).
  double kinetic_constant = 0, potential_constant = 0;
  double kinetic_constant_t1 = 0, potential_constant_t1 = 0;  // same sups over t <= 1
  std::vector<GNCheck> gn;
  SpectralField final_state;
  std::vector<std::string> notes;
  bool decay_bounds_ok() const;
  bool gn_ok() const;
};

/// Duhamel time march of u_tt - e^(2t) Lap u + m^2 u = |u|^p on the torus.
SemilinearResult solve_semilinear(const SpectralField& data, const SemilinearOptions& opt = {},
                                  ExecutionPolicy policy = ExecutionPolicy::Parallel);
nlohmann::json to_json(const SemilinearResult& r);

}  // namespace kgspec
