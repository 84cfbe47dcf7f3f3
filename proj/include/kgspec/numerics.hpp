#pragma once

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kgspec {

using cplx = std::complex<double>;
using Mat2c = Eigen::Matrix2cd;
using Vec2c = Eigen::Vector2cd;
using Mat2 = Eigen::Matrix2d;

/// Base class for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure (non-convergence, step underflow, bracketing).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Input violates an operation's precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double lo, double hi)
      : NumericalError(what + " on [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]"),
        lo_(lo), hi_(hi) {}
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_, hi_;
};

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-300;
  int max_intervals = 20000;
};

/// Adaptive Gauss-Kronrod (7/15) quadrature with global bisection.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadOptions& opt = {});

/// Fixed-order Gauss-Legendre rule on [lo, hi]; n in {2,...,8}.
double gauss_legendre(const std::function<double(double)>& f, double lo,
                      double hi, int n);

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch free, Newton).
void gauss_legendre_rule(int n, std::vector<double>& nodes,
                         std::vector<double>& weights);

/// Bisection for a sign change of f on [lo, hi]; requires f(lo)*f(hi) <= 0.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double tol);

/// Least-squares fit y ~ X beta, X given column-wise. Returns beta and fills
/// the RMS residual.
std::vector<double> least_squares(const std::vector<std::vector<double>>& cols,
                                  std::span<const double> y, double* rms);

/// Spectral norm of a complex 2x2 matrix.
double opnorm(const Mat2c& m);
double opnorm(const Mat2& m);

/// exp of a complex 2x2 matrix in closed form.
Mat2c expm2(const Mat2c& m);

/// Fixed-order (pairwise) summation so results do not depend on scheduling.
double pairwise_sum(std::span<const double> v);

}  // namespace kgspec
