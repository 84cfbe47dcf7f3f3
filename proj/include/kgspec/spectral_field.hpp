#pragma once

#include <memory>
#include <vector>

#include "kgspec/numerics.hpp"

namespace kgspec {

/// Periodic grid: M points per axis on [-L/2, L/2)^n.
struct Grid {
  int n = 1;
  int M = 64;
  double L = 1.0;

  long size() const;
  double dx() const { return L / M; }
  double volume() const;
  /// Largest retained |k| per axis, pi / dx.
  double k_max() const;
  void validate() const;
};

/// u and u_t of a real field as normalized Fourier coefficients
/// c_k = N^-1 sum_x u(x) e^(-i k.j 2 pi / M), stored in FFTW order.
/// The Nyquist index is kept at zero so padding does not break symmetry.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(Grid g);

  const Grid& grid() const { return grid_; }
  std::vector<cplx> coeffs, coeffs_t;

  /// |k|^2 for each coefficient index.
  const std::vector<double>& k2() const;

  /// Real grid values to coefficients (Nyquist zeroed) and back.
  std::vector<cplx> analyze(const std::vector<double>& values) const;
  std::vector<double> synthesize(const std::vector<cplx>& c) const;
  /// Values on a finer grid with Mp >= M points per axis (zero padding).
  std::vector<double> synthesize_padded(const std::vector<cplx>& c, int Mp) const;
  /// Coefficients from values on the padded grid, truncated to this grid's band.
  /// `tail` receives the fraction of the squared norm outside the band.
  std::vector<cplx> analyze_padded(const std::vector<double>& values, int Mp,
                                   double* tail = nullptr) const;

  /// ||u||_{L^2}, ||grad u||_{L^2} from coefficients (Parseval).
  double l2(const std::vector<cplx>& c) const;
  double grad_l2(const std::vector<cplx>& c) const;
  /// Riemann sums on grid values of this grid (or a padded grid with Mp points).
  double l2_grid(const std::vector<double>& values, int Mp = 0) const;
  double lq_grid(const std::vector<double>& values, double q, int Mp = 0) const;

  /// max |c_k - conj(c_-k)| relative to max |c|.
  double symmetry_defect(const std::vector<cplx>& c) const;

  /// Grid coordinates of flat index `i` (per axis, row-major).
  std::vector<double> point(long i) const;

 private:
  Grid grid_;
  std::shared_ptr<const std::vector<double>> k2_;
};

/// Surface area |S^{n-1}| of the unit sphere in R^n.
double sphere_area(int n);

}  // namespace kgspec
