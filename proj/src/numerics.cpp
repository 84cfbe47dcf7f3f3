#include "kgspec/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

namespace kgspec {

namespace {

// Kronrod 15 / Gauss 7 abscissae and weights.
constexpr double kXgk[8] = {0.991455371120812639206854697526329,
                            0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926,
                            0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013,
                            0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245,
                            0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970,
                            0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518,
                            0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550,
                            0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649,
                            0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082,
                           0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975,
                           0.417959183673469387755102040816327};

struct Panel {
  double lo, hi, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double f1 = f(c - x);
    const double f2 = f(c + x);
    kron += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  const double value = kron * h;
  double err = std::abs((kron - gauss) * h);
  if (!std::isfinite(value)) {
    throw QuadratureError("non-finite integrand", lo, hi);
  }
  return {lo, hi, value, err};
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadOptions& opt) {
  if (lo == hi) return 0.0;
  if (hi < lo) return -integrate(f, hi, lo, opt);
  std::priority_queue<Panel> heap;
  Panel first = gk15(f, lo, hi);
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  int count = 1;
  while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
    if (count >= opt.max_intervals) {
      const Panel& worst = heap.top();
      throw QuadratureError("quadrature did not converge", worst.lo, worst.hi);
    }
    Panel p = heap.top();
    heap.pop();
    const double mid = 0.5 * (p.lo + p.hi);
    if (mid <= p.lo || mid >= p.hi) {
      throw QuadratureError("subinterval below machine resolution", p.lo, p.hi);
    }
    Panel l = gk15(f, p.lo, mid);
    Panel r = gk15(f, mid, p.hi);
    total += l.value + r.value - p.value;
    total_err += l.error + r.error - p.error;
    heap.push(l);
    heap.push(r);
    ++count;
    // Cancellation in the running sums can leave a stale estimate; recompute.
    if (count % 64 == 0) {
      auto copy = heap;
      total = 0.0;
      total_err = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        total_err += copy.top().error;
        copy.pop();
      }
    }
  }
  return total;
}

void gauss_legendre_rule(int n, std::vector<double>& nodes,
                         std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

double gauss_legendre(const std::function<double(double)>& f, double lo,
                      double hi, int n) {
  static thread_local std::vector<double> x, w;
  static thread_local int cached = -1;
  if (cached != n) {
    gauss_legendre_rule(n, x, w);
    cached = n;
  }
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += w[i] * f(c + h * x[i]);
  return s * h;
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double tol) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    throw NumericalError("bisection interval does not bracket a root");
  }
  while (hi - lo > tol * std::max(1.0, std::abs(lo))) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> least_squares(const std::vector<std::vector<double>>& cols,
                                  std::span<const double> y, double* rms) {
  const auto n = static_cast<Eigen::Index>(y.size());
  const auto p = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd Y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Y(i) = y[i];
    for (Eigen::Index j = 0; j < p; ++j) X(i, j) = cols[j][i];
  }
  Eigen::VectorXd beta = X.colPivHouseholderQr().solve(Y);
  if (rms) {
    *rms = std::sqrt((X * beta - Y).squaredNorm() / std::max<Eigen::Index>(n, 1));
  }
  return {beta.data(), beta.data() + p};
}

double opnorm(const Mat2c& m) {
  // Largest singular value of a 2x2 matrix from the eigenvalues of m^H m.
  const Mat2c g = m.adjoint() * m;
  const double a = g(0, 0).real(), d = g(1, 1).real();
  const double b = std::abs(g(0, 1));
  const double tr = a + d;
  const double disc = std::sqrt(std::max(0.0, 0.25 * (a - d) * (a - d) + b * b));
  return std::sqrt(std::max(0.0, 0.5 * tr + disc));
}

double opnorm(const Mat2& m) { return opnorm(Mat2c(m.cast<cplx>())); }

Mat2c expm2(const Mat2c& m) {
  const cplx c = 0.5 * m.trace();
  const Mat2c b = m - c * Mat2c::Identity();
  const cplx s2 = -b.determinant();
  const cplx s = std::sqrt(s2);
  cplx ch, sh_over_s;
  if (std::abs(s) < 1e-4) {
    ch = 1.0 + s2 / 2.0 + s2 * s2 / 24.0;
    sh_over_s = 1.0 + s2 / 6.0 + s2 * s2 / 120.0;
  } else {
    ch = std::cosh(s);
    sh_over_s = std::sinh(s) / s;
  }
  return std::exp(c) * (ch * Mat2c::Identity() + sh_over_s * b);
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

}  // namespace kgspec
