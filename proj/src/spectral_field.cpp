#include "kgspec/spectral_field.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace kgspec {

namespace {

long ipow(int b, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Signed wavenumber index of axis position j on an M grid; M/2 maps to M/2.
int signed_index(int j, int M) { return j <= M / 2 ? j : j - M; }

// Real transforms on an Mp^n grid; the spectrum holds Mp/2 + 1 entries on the last axis.
struct RealPlans {
  fftw_plan forward = nullptr, backward = nullptr;
};

// FFTW planning is not thread-safe; execution with new arrays is.
std::mutex& plan_mutex() {
  static std::mutex mu;
  return mu;
}

RealPlans get_plans(int n, int Mp) {
  static std::map<std::pair<int, int>, RealPlans> plans;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto key = std::make_pair(n, Mp);
  if (auto it = plans.find(key); it != plans.end()) return it->second;
  std::vector<int> dims(n, Mp);
  const long real = ipow(Mp, n), half = real / Mp * (Mp / 2 + 1);
  double* r = fftw_alloc_real(real);
  fftw_complex* c = fftw_alloc_complex(half);
  RealPlans p;
  p.forward = fftw_plan_dft_r2c(n, dims.data(), r, c, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.backward = fftw_plan_dft_c2r(n, dims.data(), c, r,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_DESTROY_INPUT);
  fftw_free(r);
  fftw_free(c);
  if (!p.forward || !p.backward) throw NumericalError("FFTW plan creation failed");
  plans.emplace(key, p);
  return p;
}

// Retained modes (|k_a| < M/2) of the M grid located in the half spectrum of the
// Mp grid. Modes with a negative last index are read as conjugates of -k.
struct BandEntry {
  long i, half;
  bool conj;
};

const std::vector<BandEntry>& band_map(int n, int M, int Mp) {
  static std::map<std::tuple<int, int, int>, std::shared_ptr<std::vector<BandEntry>>> maps;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto key = std::make_tuple(n, M, Mp);
  if (auto it = maps.find(key); it != maps.end()) return *it->second;
  auto out = std::make_shared<std::vector<BandEntry>>();
  const long N = ipow(M, n);
  const int H = Mp / 2 + 1;
  std::vector<int> j(n, 0), k(n);
  for (long i = 0; i < N; ++i) {
    bool keep = true;
    for (int a = 0; a < n; ++a) {
      k[a] = signed_index(j[a], M);
      if (2 * std::abs(k[a]) >= M) keep = false;
    }
    if (keep) {
      const bool cj = k[n - 1] < 0;
      long h = 0;
      for (int a = 0; a < n; ++a) {
        const int ka = cj ? -k[a] : k[a];
        h = a + 1 < n ? h * Mp + ((ka % Mp) + Mp) % Mp : h * H + ka;
      }
      out->push_back({i, h, cj});
    }
    for (int a = n - 1; a >= 0; --a) {
      if (++j[a] < M) break;
      j[a] = 0;
    }
  }
  maps.emplace(key, out);
  return *out;
}

}  // namespace

long Grid::size() const { return ipow(M, n); }

double Grid::volume() const { return std::pow(L, n); }

double Grid::k_max() const { return std::numbers::pi / dx(); }

void Grid::validate() const {
  if (n < 1 || n > 4) throw DomainError("grid dimension must be in 1..4");
  if (M < 4 || M % 2) throw DomainError("grid needs an even M >= 4");
  if (!(L > 0.0)) throw DomainError("grid period must be positive");
}

SpectralField::SpectralField(Grid g) : grid_(g) {
  grid_.validate();
  const long N = grid_.size();
  coeffs.assign(N, cplx(0.0, 0.0));
  coeffs_t.assign(N, cplx(0.0, 0.0));
  auto k2 = std::make_shared<std::vector<double>>(N, 0.0);
  const double dk = 2.0 * std::numbers::pi / grid_.L;
  std::vector<int> j(grid_.n, 0);
  for (long i = 0; i < N; ++i) {
    double s = 0.0;
    for (int a = 0; a < grid_.n; ++a) {
      const double k = dk * signed_index(j[a], grid_.M);
      s += k * k;
    }
    (*k2)[i] = s;
    for (int a = grid_.n - 1; a >= 0; --a) {
      if (++j[a] < grid_.M) break;
      j[a] = 0;
    }
  }
  k2_ = std::move(k2);
}

const std::vector<double>& SpectralField::k2() const { return *k2_; }

std::vector<cplx> SpectralField::analyze(const std::vector<double>& values) const {
  return analyze_padded(values, grid_.M);
}

std::vector<double> SpectralField::synthesize(const std::vector<cplx>& c) const {
  return synthesize_padded(c, grid_.M);
}

std::vector<double> SpectralField::synthesize_padded(const std::vector<cplx>& c, int Mp) const {
  if (Mp < grid_.M || Mp % 2) throw DomainError("padded grid must be even and not coarser");
  const int n = grid_.n;
  const long Np = ipow(Mp, n), half = Np / Mp * (Mp / 2 + 1);
  std::vector<cplx> spec(half, cplx(0.0, 0.0));
  for (const auto& e : band_map(n, grid_.M, Mp))
    if (!e.conj) spec[e.half] = c[e.i];
  std::vector<double> out(Np);
  fftw_execute_dft_c2r(get_plans(n, Mp).backward, reinterpret_cast<fftw_complex*>(spec.data()),
                       out.data());
  return out;
}

std::vector<cplx> SpectralField::analyze_padded(const std::vector<double>& values, int Mp,
                                                double* tail) const {
  const int n = grid_.n;
  const long Np = ipow(Mp, n), half = Np / Mp * (Mp / 2 + 1);
  if (Mp % 2 || static_cast<long>(values.size()) != Np)
    throw DomainError("grid value count mismatch");
  std::vector<double> in(values);
  std::vector<cplx> spec(half);
  fftw_execute_dft_r2c(get_plans(n, Mp).forward, in.data(),
                       reinterpret_cast<fftw_complex*>(spec.data()));
  const double inv = 1.0 / static_cast<double>(Np);
  std::vector<cplx> c(grid_.size(), cplx(0.0, 0.0));
  for (const auto& e : band_map(n, grid_.M, Mp))
    c[e.i] = e.conj ? std::conj(spec[e.half]) * inv : spec[e.half] * inv;
  if (tail) {
    // Full-spectrum energy from the half spectrum: interior last-axis entries count twice.
    const int H = Mp / 2 + 1;
    std::vector<double> w(half);
    for (long h = 0; h < half; ++h) {
      const long kl = h % H;
      w[h] = (kl == 0 || kl == Mp / 2 ? 1.0 : 2.0) * std::norm(spec[h]);
    }
    std::vector<double> k(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) k[i] = std::norm(c[i]);
    const double total = pairwise_sum(w) * inv * inv, kept = pairwise_sum(k);
    *tail = total > 0.0 ? std::max(0.0, total - kept) / total : 0.0;
  }
  return c;
}

double SpectralField::l2(const std::vector<cplx>& c) const {
  std::vector<double> v(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) v[i] = std::norm(c[i]);
  return std::sqrt(grid_.volume() * pairwise_sum(v));
}

double SpectralField::grad_l2(const std::vector<cplx>& c) const {
  const auto& k = k2();
  std::vector<double> v(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) v[i] = k[i] * std::norm(c[i]);
  return std::sqrt(grid_.volume() * pairwise_sum(v));
}

double SpectralField::l2_grid(const std::vector<double>& values, int Mp) const {
  return lq_grid(values, 2.0, Mp);
}

double SpectralField::lq_grid(const std::vector<double>& values, double q, int Mp) const {
  const int mp = Mp > 0 ? Mp : grid_.M;
  const double cell = std::pow(grid_.L / mp, grid_.n);
  std::vector<double> v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v[i] = std::pow(std::abs(values[i]), q);
  return std::pow(cell * pairwise_sum(v), 1.0 / q);
}

double SpectralField::symmetry_defect(const std::vector<cplx>& c) const {
  const int n = grid_.n, M = grid_.M;
  double worst = 0.0, scale = 0.0;
  std::vector<int> j(n, 0);
  for (long i = 0; i < grid_.size(); ++i) {
    long mirror = 0;
    for (int a = 0; a < n; ++a) mirror = mirror * M + (M - j[a]) % M;
    worst = std::max(worst, std::abs(c[i] - std::conj(c[mirror])));
    scale = std::max(scale, std::abs(c[i]));
    for (int a = n - 1; a >= 0; --a) {
      if (++j[a] < M) break;
      j[a] = 0;
    }
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

std::vector<double> SpectralField::point(long i) const {
  std::vector<double> x(grid_.n);
  for (int a = grid_.n - 1; a >= 0; --a) {
    x[a] = -0.5 * grid_.L + grid_.dx() * static_cast<double>(i % grid_.M);
    i /= grid_.M;
  }
  return x;
}

double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace kgspec
