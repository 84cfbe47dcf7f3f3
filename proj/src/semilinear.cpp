#include "kgspec/semilinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "kgspec/coeffs.hpp"
#include "kgspec/modes.hpp"

namespace kgspec {

namespace {

using Key = std::tuple<double, double, double, double>;

std::mutex& cache_mutex() {
  static std::mutex mu;
  return mu;
}

std::map<Key, KernelValues>& cache() {
  static std::map<Key, KernelValues> c;
  return c;
}

// With a = e^t the kernel from s at xi equals the kernel from 0 at xi e^s.
CoefficientProfile shifted_profile(double m) {
  return CoefficientProfile(speed_exponential(), mass_constant(m), "exp");
}

ModeOptions kernel_options() {
  // The Z-frame step is second order; the kernels serve as reference values.
  ModeOptions o;
  o.tol = 1e-12;
  o.z_frame = false;
  return o;
}

// Runs fn(lo, hi) over chunks of [0, n).
template <class Fn>
void for_chunks(long n, ExecutionPolicy policy, Fn&& fn) {
  constexpr long chunk = 2048;
  const long count = (n + chunk - 1) / chunk;
  for_each_index(count, policy, [&](long c) { fn(c * chunk, std::min(n, (c + 1) * chunk)); });
}

Mat2 magnus_substep(double m, double k2, double t, double h) {
  const double r = std::sqrt(3.0) / 6.0;
  const double t1 = t + h * (0.5 - r), t2 = t + h * (0.5 + r);
  const double w1 = std::exp(2.0 * t1) * k2 + m * m;
  const double w2 = std::exp(2.0 * t2) * k2 + m * m;
  Mat2 O;
  const double c = std::sqrt(3.0) / 12.0 * h * h * (w2 - w1);
  O << c, h, -0.5 * h * (w1 + w2), -c;
  // O is traceless: O^2 = -det(O) I.
  const double det = -c * c + 0.5 * h * h * (w1 + w2);
  Mat2 E = Mat2::Identity();
  if (det > 0.0) {
    const double th = std::sqrt(det);
    E = std::cos(th) * Mat2::Identity() + (std::sin(th) / th) * O;
  } else if (det < 0.0) {
    const double th = std::sqrt(-det);
    E = std::cosh(th) * Mat2::Identity() + (std::sinh(th) / th) * O;
  } else {
    E += O;
  }
  return E;
}

struct Norms {
  double u = 0, grad = 0, ut = 0;
};

Norms field_norms(const SpectralField& f, const std::vector<cplx>& c,
                  const std::vector<cplx>& ct) {
  return {f.l2(c), f.grad_l2(c), f.l2(ct)};
}

}  // namespace

KernelValues linear_kernels(double m, double s, double t, double xi_norm) {
  return linear_kernel_series(m, s, {t}, xi_norm).front();
}

std::vector<KernelValues> linear_kernel_series(double m, double s,
                                               const std::vector<double>& times,
                                               double xi_norm) {
  if (!(xi_norm >= 0.0)) throw DomainError("linear_kernels: |xi| must be nonnegative");
  std::vector<KernelValues> out(times.size());
  std::vector<double> missing;
  std::vector<std::size_t> where;
  {
    std::lock_guard<std::mutex> lock(cache_mutex());
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] < s) throw DomainError("linear_kernels: t must not precede s");
      auto it = cache().find({m, s, times[i], xi_norm});
      if (it != cache().end()) {
        out[i] = it->second;
      } else {
        missing.push_back(times[i] - s);
        where.push_back(i);
      }
    }
  }
  if (missing.empty()) return out;
  std::vector<std::size_t> order(missing.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return missing[a] < missing[b]; });
  std::vector<double> sorted(missing.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = missing[order[i]];
  // u = K0 + i K1 carries both kernels since the equation is real.
  auto tr = integrate_mode(shifted_profile(m), xi_norm * std::exp(s), cplx(1.0, 0.0),
                           cplx(0.0, 1.0), sorted, kernel_options());
  std::lock_guard<std::mutex> lock(cache_mutex());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto j = where[order[i]];
    KernelValues kv{tr.u[i].real(), tr.ut[i].real(), tr.u[i].imag(), tr.ut[i].imag()};
    out[j] = kv;
    cache()[{m, s, times[j], xi_norm}] = kv;
  }
  return out;
}

std::size_t kernel_cache_size() {
  std::lock_guard<std::mutex> lock(cache_mutex());
  return cache().size();
}

void clear_kernel_cache() {
  std::lock_guard<std::mutex> lock(cache_mutex());
  cache().clear();
}

Mat2 step_propagator(double m, double k2, double t, double h, double max_phase) {
  if (!(h >= 0.0)) throw DomainError("step_propagator: negative step");
  if (h == 0.0) return Mat2::Identity();
  const double wmax = std::sqrt(std::exp(2.0 * (t + h)) * k2 + m * m);
  const int sub = std::max(1, static_cast<int>(std::ceil(wmax * h / max_phase)));
  const double hs = h / sub;
  Mat2 P = Mat2::Identity();
  for (int i = 0; i < sub; ++i) P = magnus_substep(m, k2, t + i * hs, hs) * P;
  return P;
}

double d_kernel(int n, double q, double t, double s) {
  if (std::abs(n - q / (2.0 - q)) > 1e-12) return 1.0;
  return std::pow(std::max(0.0, t - s), (2.0 - q) / (2.0 * q));
}

double d_xnorm(int n, double t) { return n == 1 ? std::max(1.0, std::sqrt(t)) : 1.0; }

double KernelBoundRow::energy_ratio() const { return energy_lhs / energy_rhs; }

double KernelBoundRow::l2_ratio() const { return d > 0.0 ? l2_lhs / (l2_rhs * d) : 0.0; }

double KernelBoundRow::l2_ratio_without_d() const { return l2_lhs / l2_rhs; }

KernelBoundReport check_kernel_bounds(double m, const std::vector<double>& s_grid,
                                      const std::vector<double>& t_grid, double q, int n, int xi_count,
                                      double sigma, ExecutionPolicy policy) {
  if (n < 1) throw DomainError("check_kernel_bounds: n >= 1");
  if (!(q >= 1.0 && q < 2.0)) throw DomainError("check_kernel_bounds: q must lie in [1, 2)");
  if (xi_count < 16) throw DomainError("check_kernel_bounds: xi_count >= 16");
  KernelBoundReport rep;
  rep.n = n;
  rep.q = q;
  rep.m = m;
  rep.sigma = sigma;
  rep.xi_count = xi_count;
  rep.critical = std::abs(n - q / (2.0 - q)) <= 1e-12;

  const double t_max = *std::max_element(t_grid.begin(), t_grid.end());
  const double lo = std::log(1e-4 / sigma) - t_max, hi = std::log(12.0 / sigma);
  const double dl = (hi - lo) / (xi_count - 1);
  std::vector<double> xi(xi_count), w(xi_count);
  const double pref = sphere_area(n) / std::pow(2.0 * std::numbers::pi, n);
  for (int i = 0; i < xi_count; ++i) {
    xi[i] = std::exp(lo + dl * i);
    const double fhat = std::pow(2.0 * std::numbers::pi * sigma * sigma, 0.5 * n) *
                        std::exp(-0.5 * sigma * sigma * xi[i] * xi[i]);
    const double trap = (i == 0 || i == xi_count - 1) ? 0.5 : 1.0;
    w[i] = pref * trap * dl * std::pow(xi[i], n) * fhat * fhat;
  }
  const double f2 = std::pow(std::numbers::pi * sigma * sigma, 0.25 * n);
  const double fq = std::pow(2.0 * std::numbers::pi * sigma * sigma / q, n / (2.0 * q));

  for (double s : s_grid) {
    std::vector<double> ts;
    for (double t : t_grid)
      if (t > s) ts.push_back(t);
    if (ts.empty()) continue;
    std::sort(ts.begin(), ts.end());
    std::vector<std::vector<KernelValues>> kv(xi_count);
    for_each_index(xi_count, policy,
                   [&](long i) { kv[i] = linear_kernel_series(m, s, ts, xi[i]); });
    for (std::size_t j = 0; j < ts.size(); ++j) {
      const double t = ts[j];
      std::vector<double> a(xi_count), b(xi_count), c(xi_count);
      for (int i = 0; i < xi_count; ++i) {
        const auto& k = kv[i][j];
        a[i] = w[i] * k.K1_t * k.K1_t;
        b[i] = w[i] * xi[i] * xi[i] * k.K1 * k.K1;
        c[i] = w[i] * k.K1 * k.K1;
      }
      KernelBoundRow row;
      row.s = s;
      row.t = t;
      row.energy_lhs = std::sqrt(pairwise_sum(a)) + std::exp(t) * std::sqrt(pairwise_sum(b));
      row.energy_rhs = std::exp(0.5 * (t - s)) * f2;
      row.l2_lhs = std::sqrt(pairwise_sum(c));
      row.l2_rhs = std::exp(0.5 * (s - t)) * (f2 + fq);
      row.d = d_kernel(n, q, t, s);
      rep.sup_energy = std::max(rep.sup_energy, row.energy_ratio());
      rep.sup_l2 = std::max(rep.sup_l2, row.l2_ratio());
      rep.sup_l2_without_d = std::max(rep.sup_l2_without_d, row.l2_ratio_without_d());
      rep.rows.push_back(row);
    }
  }
  return rep;
}

nlohmann::json to_json(const KernelBoundReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& x : r.rows) {
    rows.push_back({{"s", x.s},
                    {"t", x.t},
                    {"energy_ratio", x.energy_ratio()},
                    {"l2_ratio", x.l2_ratio()},
                    {"l2_ratio_without_d", x.l2_ratio_without_d()},
                    {"d", x.d}});
  }
  return {{"n", r.n},         {"q", r.q},
          {"m", r.m},         {"sigma", r.sigma},
          {"xi_count", r.xi_count}, {"critical", r.critical},
          {"sup_energy", r.sup_energy}, {"sup_l2", r.sup_l2},
          {"sup_l2_without_d", r.sup_l2_without_d}, {"rows", rows}};
}

void XNormLedger::add(double time, double value) {
  t.push_back(time);
  samples.push_back(value);
  sup_so_far.push_back(std::max(sup(), value));
}

double XNormLedger::sup_until(double time) const {
  double s = 0.0;
  for (std::size_t i = 0; i < t.size() && t[i] <= time; ++i) s = sup_so_far[i];
  return s;
}

double x_weighted(int n, double t, double u_l2, double grad_l2, double ut_l2) {
  return std::exp(0.5 * t) * (u_l2 / d_xnorm(n, t) + grad_l2 + std::exp(-t) * ut_l2);
}

SpectralField gaussian_data(const Grid& g, double sigma, double u0_amp, double u1_amp,
                            bool mean_free) {
  SpectralField f(g);
  std::vector<double> v(g.size());
  for (long i = 0; i < g.size(); ++i) {
    double r2 = 0.0;
    for (double x : f.point(i)) r2 += x * x;
    v[i] = std::exp(-0.5 * r2 / (sigma * sigma));
  }
  auto c = f.analyze(v);
  if (mean_free) c[0] = 0.0;
  for (long i = 0; i < g.size(); ++i) {
    f.coeffs[i] = u0_amp * c[i];
    f.coeffs_t[i] = u1_amp * c[i];
  }
  return f;
}

double d1_norm(const SpectralField& f) {
  const auto u0 = f.synthesize(f.coeffs), u1 = f.synthesize(f.coeffs_t);
  const double a = f.lq_grid(u0, 1.0), b = f.lq_grid(u1, 1.0);
  const double h0 = f.l2(f.coeffs), h1 = f.grad_l2(f.coeffs), c = f.l2(f.coeffs_t);
  return std::sqrt(a * a + h0 * h0 + h1 * h1 + b * b + c * c);
}

void scale_to_d1(SpectralField& f, double target) {
  const double now = d1_norm(f);
  if (!(now > 0.0)) throw DomainError("scale_to_d1: zero data");
  const double s = target / now;
  for (auto& c : f.coeffs) c *= s;
  for (auto& c : f.coeffs_t) c *= s;
}

Grid resolving_grid(int n, int M, double sigma) {
  Grid g{n, M, M * sigma * std::numbers::pi / 6.5};
  g.validate();
  return g;
}

bool SemilinearResult::decay_bounds_ok() const {
  auto ok = [](double all, double early) {
    return std::isfinite(all) && early > 0.0 && all <= 10.0 * early;
  };
  return ok(kinetic_constant, kinetic_constant_t1) &&
         ok(potential_constant, potential_constant_t1);
}

bool SemilinearResult::gn_ok() const {
  return std::all_of(gn.begin(), gn.end(), [](const GNCheck& g) { return g.ok; });
}

SemilinearResult solve_semilinear(const SpectralField& data, const SemilinearOptions& opt,
                                  ExecutionPolicy policy) {
  const Grid& g = data.grid();
  const int n = g.n;
  const double p = opt.p;
  if (!(p > 1.0)) throw DomainError("semilinear: p must exceed 1");
  if (n >= 2 && p < 2.0) throw DomainError("semilinear: p >= 2 is required for n >= 2");
  if (n >= 3 && p > n / (n - 2.0) + 1e-12)
    throw DomainError("semilinear: p <= n/(n-2) is required for n >= 3");
  if (!(opt.horizon > 0.0)) throw DomainError("semilinear: horizon must be positive");
  if (opt.tol <= 0.0 || opt.max_picard < 1) throw DomainError("semilinear: bad Picard settings");

  SemilinearResult res;
  const long N = g.size();
  const auto& k2 = data.k2();
  const double T = opt.horizon, m = opt.m;

  double pad = opt.pad_factor > 0.0 ? opt.pad_factor : 0.5 * p + 1.0;
  int Mp = static_cast<int>(std::ceil(pad * g.M));
  Mp += Mp % 2;
  res.padded_M = Mp;

  // Unique |k|^2 so propagators are built once per shell.
  std::vector<double> shells(k2.begin(), k2.end());
  std::sort(shells.begin(), shells.end());
  shells.erase(std::unique(shells.begin(), shells.end()), shells.end());
  std::vector<int> shell_of(N);
  for (long i = 0; i < N; ++i)
    shell_of[i] = static_cast<int>(std::lower_bound(shells.begin(), shells.end(), k2[i]) -
                                   shells.begin());

  double emax = 0.0;
  for (long i = 0; i < N; ++i)
    emax = std::max(emax, (1.0 + k2[i]) * (std::norm(data.coeffs[i]) + std::norm(data.coeffs_t[i])));
  double kd = 0.0;
  for (long i = 0; i < N; ++i)
    if ((1.0 + k2[i]) * (std::norm(data.coeffs[i]) + std::norm(data.coeffs_t[i])) > 1e-20 * emax)
      kd = std::max(kd, std::sqrt(k2[i]));
  res.k_cut = std::min(g.k_max(), std::max(p, 1.0) * kd);

  std::vector<cplx> u = data.coeffs, ut = data.coeffs_t;
  res.data_norm = d1_norm(data);
  const Norms n0 = field_norms(data, u, ut);
  const double kin_den = std::hypot(n0.u, n0.grad) + n0.ut;
  const double pot_den = res.data_norm;

  auto nonlinear_term = [&](const std::vector<cplx>& c) {
    auto v = data.synthesize_padded(c, Mp);
    if (p == 2.0) {
      for (auto& x : v) x = x * x;
    } else {
      for (auto& x : v) x = std::pow(std::abs(x), p);
    }
    double tail = 0.0;
    auto F = data.analyze_padded(v, Mp, &tail);
    res.alias_tail_max = std::max(res.alias_tail_max, tail);
    if (tail > opt.alias_tol)
      throw NumericalError("semilinear: |u|^p leaves the resolved band (tail fraction " +
                           std::to_string(tail) + "), increase M");
    return F;
  };
  auto xnorm = [&](const std::vector<cplx>& c, const std::vector<cplx>& ct, double t) {
    const Norms z = field_norms(data, c, ct);
    return x_weighted(n, t, z.u, z.grad, z.ut);
  };

  std::size_t gn_next = 0;
  std::vector<double> gn_times = opt.gn_times;
  std::sort(gn_times.begin(), gn_times.end());
  auto record = [&](double t) {
    const Norms z = field_norms(data, u, ut);
    res.t.push_back(t);
    res.u_l2.push_back(z.u);
    res.grad_l2.push_back(z.grad);
    res.ut_l2.push_back(z.ut);
    const double x = x_weighted(n, t, z.u, z.grad, z.ut);
    res.ledger.add(t, x);
    const double kin = std::exp(-0.5 * t) * (z.ut + std::exp(t) * z.grad) / kin_den;
    const double pot = std::exp(0.5 * t) * z.u / (d_xnorm(n, t) * pot_den);
    res.kinetic_constant = std::max(res.kinetic_constant, kin);
    res.potential_constant = std::max(res.potential_constant, pot);
    if (t <= 1.0) {
      res.kinetic_constant_t1 = std::max(res.kinetic_constant_t1, kin);
      res.potential_constant_t1 = std::max(res.potential_constant_t1, pot);
    }
    if (!std::isfinite(x) || x > opt.smallness_factor * res.data_norm) {
      throw SmallnessViolated(t, "semilinear: X-norm " + std::to_string(x) + " at t = " +
                                     std::to_string(t) + " exceeds " +
                                     std::to_string(opt.smallness_factor) +
                                     " times the data norm; data not small enough");
    }
    while (gn_next < gn_times.size() && gn_times[gn_next] <= t + 1e-12) {
      const auto v = data.synthesize_padded(u, Mp);
      for (int k = 1; k <= 2; ++k) {
        GNCheck c;
        c.t = t;
        c.k = k;
        c.theta = n * (0.5 - 1.0 / (k * p));
        if (c.theta < 0.0 || c.theta > 1.0) {
          res.notes.push_back("Gagliardo-Nirenberg exponent outside [0,1] for k = " +
                              std::to_string(k));
          continue;
        }
        const double lr = data.lq_grid(v, k * p, Mp);
        c.constant = std::pow(lr, p) /
                     (std::pow(z.u, p * (1.0 - c.theta)) * std::pow(z.grad, p * c.theta));
        c.ok = std::isfinite(c.constant) && c.constant <= opt.gn_bound;
        res.gn.push_back(c);
      }
      ++gn_next;
    }
  };

  std::vector<cplx> Fj(N, cplx(0.0, 0.0));
  if (opt.nonlinear) Fj = nonlinear_term(u);
  std::vector<cplx> Ru(N, cplx(0.0, 0.0)), Rt(N, cplx(0.0, 0.0));
  record(0.0);

  std::vector<Mat2> P1(shells.size()), P2(shells.size());
  std::vector<cplx> Lh_u(N), Lh_t(N), Le_u(N), Le_t(N), Hu(N), Ht(N), Eu(N), Et(N);
  std::vector<cplx> Fh(N), Fe(N), ru(N), rt(N), F_prev(N);
  double t = 0.0, h_prev = 0.0;
  while (t < T * (1.0 - 1e-14)) {
    const double wcut = std::sqrt(std::exp(2.0 * t) * res.k_cut * res.k_cut + m * m);
    double h = std::min({opt.max_step, opt.step_phase / wcut, T - t});
    const double hh = 0.5 * h;
    for_each_index(static_cast<long>(shells.size()), policy, [&](long s) {
      P1[s] = step_propagator(m, shells[s], t, hh, opt.magnus_phase);
      P2[s] = step_propagator(m, shells[s], t + hh, hh, opt.magnus_phase);
    });
    // Linear parts plus the known F_j contributions.
    for_chunks(N, policy, [&](long lo, long hi) {
      for (long i = lo; i < hi; ++i) {
        const Mat2& A = P1[shell_of[i]];
        const Mat2& B = P2[shell_of[i]];
        const cplx a = u[i], b = ut[i], f = Fj[i];
        const cplx hu = A(0, 0) * a + A(0, 1) * b, ht = A(1, 0) * a + A(1, 1) * b;
        Lh_u[i] = hu + 0.25 * h * A(0, 1) * f;
        Lh_t[i] = ht + 0.25 * h * A(1, 1) * f;
        const cplx eu = B(0, 0) * hu + B(0, 1) * ht, et = B(1, 0) * hu + B(1, 1) * ht;
        const cplx gu = A(0, 1) * f, gt = A(1, 1) * f;
        Le_u[i] = eu + h / 6.0 * (B(0, 0) * gu + B(0, 1) * gt);
        Le_t[i] = et + h / 6.0 * (B(1, 0) * gu + B(1, 1) * gt);
      }
    });
    if (!opt.nonlinear) {
      u = Le_u;
      ut = Le_t;
    } else {
      // Linear extrapolation of F from the previous step as the first guess.
      for_chunks(N, policy, [&](long lo, long hi) {
        for (long i = lo; i < hi; ++i) {
          const cplx slope = h_prev > 0.0 ? (Fj[i] - F_prev[i]) / h_prev : cplx(0.0, 0.0);
          Fh[i] = Fj[i] + hh * slope;
          Fe[i] = Fj[i] + h * slope;
        }
      });
      const double scale = std::max(res.ledger.sup(), res.ledger.samples.front());
      const double thr = 0.1 * opt.tol * scale * h / T;
      int it = 0;
      for (;;) {
        ++it;
        for_chunks(N, policy, [&](long lo, long hi) {
          for (long i = lo; i < hi; ++i) {
            const Mat2& B = P2[shell_of[i]];
            Hu[i] = Lh_u[i];
            Ht[i] = Lh_t[i] + 0.25 * h * Fh[i];
            Eu[i] = Le_u[i] + h / 6.0 * 4.0 * B(0, 1) * Fh[i];
            Et[i] = Le_t[i] + h / 6.0 * (4.0 * B(1, 1) * Fh[i] + Fe[i]);
          }
        });
        auto nFh = nonlinear_term(Hu);
        auto nFe = nonlinear_term(Eu);
        for_chunks(N, policy, [&](long lo, long hi) {
          for (long i = lo; i < hi; ++i) {
            const Mat2& B = P2[shell_of[i]];
            const cplx dh = nFh[i] - Fh[i], de = nFe[i] - Fe[i];
            ru[i] = h / 6.0 * 4.0 * B(0, 1) * dh;
            rt[i] = h / 6.0 * (4.0 * B(1, 1) * dh + de);
          }
        });
        const double rx = xnorm(ru, rt, t + h);
        if (rx <= thr || it >= opt.max_picard) {
          if (rx > thr)
            throw NumericalError("semilinear: Picard iteration did not converge at t = " +
                                 std::to_string(t) + "; data not small enough");
          u = Eu;
          ut = Et;
          F_prev.swap(Fj);
          Fj = std::move(nFe);
          h_prev = h;
          // Accumulated consistency defect Pu - u, propagated with the linear flow.
          for_chunks(N, policy, [&](long lo, long hi) {
            for (long i = lo; i < hi; ++i) {
              const Mat2 P = P2[shell_of[i]] * P1[shell_of[i]];
              const cplx a = Ru[i], b = Rt[i];
              Ru[i] = P(0, 0) * a + P(0, 1) * b + ru[i];
              Rt[i] = P(1, 0) * a + P(1, 1) * b + rt[i];
            }
          });
          break;
        }
        Fh = std::move(nFh);
        Fe = std::move(nFe);
      }
      res.picard_iterations_max = std::max(res.picard_iterations_max, it);
    }
    t = (T - t - h <= 1e-14 * T) ? T : t + h;
    ++res.steps;
    record(t);
    if (opt.nonlinear)
      res.picard_residual =
          std::max(res.picard_residual, xnorm(Ru, Rt, t) / res.ledger.samples.back());
  }
  res.final_state = data;
  res.final_state.coeffs = u;
  res.final_state.coeffs_t = ut;
  return res;
}

nlohmann::json to_json(const SemilinearResult& r) {
  nlohmann::json gn = nlohmann::json::array();
  for (const auto& c : r.gn)
    gn.push_back({{"t", c.t}, {"k", c.k}, {"theta", c.theta}, {"constant", c.constant},
                  {"ok", c.ok}});
  return {{"data_norm", r.data_norm},
          {"steps", r.steps},
          {"padded_M", r.padded_M},
          {"k_cut", r.k_cut},
          {"picard_residual", r.picard_residual},
          {"picard_iterations_max", r.picard_iterations_max},
          {"alias_tail_max", r.alias_tail_max},
          {"x_norm_sup", r.ledger.sup()},
          {"x_norm_sup_t1", r.ledger.sup_until(1.0)},
          {"kinetic_constant", r.kinetic_constant},
          {"kinetic_constant_t1", r.kinetic_constant_t1},
          {"potential_constant", r.potential_constant},
          {"potential_constant_t1", r.potential_constant_t1},
          {"decay_bounds_ok", r.decay_bounds_ok()},
          {"gagliardo_nirenberg", gn},
          {"notes", r.notes},
          {"series", {{"t", r.t}, {"u_l2", r.u_l2}, {"grad_l2", r.grad_l2}, {"ut_l2", r.ut_l2},
                      {"x_norm", r.ledger.samples}}}};
}

}  // namespace kgspec
