#include "kgspec/coeffs.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

namespace kgspec {

namespace {

using Fn = std::function<double(double)>;

// Tiny recursive-descent parser for expressions in t.
class ExprParser {
 public:
  explicit ExprParser(std::string s) : s_(std::move(s)) {}

  Fn parse() {
    Fn f = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw DomainError("expression \"" + s_ + "\": " + why + " at offset " +
                      std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Fn sum() {
    Fn lhs = product();
    for (;;) {
      if (eat('+')) {
        Fn r = product();
        lhs = [l = lhs, r](double t) { return l(t) + r(t); };
      } else if (eat('-')) {
        Fn r = product();
        lhs = [l = lhs, r](double t) { return l(t) - r(t); };
      } else {
        return lhs;
      }
    }
  }

  Fn product() {
    Fn lhs = unary();
    for (;;) {
      if (eat('*')) {
        Fn r = unary();
        lhs = [l = lhs, r](double t) { return l(t) * r(t); };
      } else if (eat('/')) {
        Fn r = unary();
        lhs = [l = lhs, r](double t) { return l(t) / r(t); };
      } else {
        return lhs;
      }
    }
  }

  Fn unary() {
    if (eat('-')) {
      Fn f = unary();
      return [f](double t) { return -f(t); };
    }
    if (eat('+')) return unary();
    return power();
  }

  Fn power() {
    Fn base = atom();
    if (eat('^')) {
      Fn ex = unary();  // right associative
      return [base, ex](double t) { return std::pow(base(t), ex(t)); };
    }
    return base;
  }

  Fn atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (eat('(')) {
      Fn f = sum();
      if (!eat(')')) fail("missing ')'");
      return f;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      const double v = std::stod(s_.substr(pos_), &used);
      pos_ += used;
      return [v](double) { return v; };
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "t") return [](double t) { return t; };
      if (name == "e") return [](double) { return std::numbers::e; };
      if (name == "pi") return [](double) { return std::numbers::pi; };
      double (*fn)(double) = nullptr;
      if (name == "exp") fn = [](double x) { return std::exp(x); };
      else if (name == "log" || name == "ln") fn = [](double x) { return std::log(x); };
      else if (name == "sqrt") fn = [](double x) { return std::sqrt(x); };
      else if (name == "sin") fn = [](double x) { return std::sin(x); };
      else if (name == "cos") fn = [](double x) { return std::cos(x); };
      else if (name == "tan") fn = [](double x) { return std::tan(x); };
      else if (name == "sinh") fn = [](double x) { return std::sinh(x); };
      else if (name == "cosh") fn = [](double x) { return std::cosh(x); };
      else if (name == "tanh") fn = [](double x) { return std::tanh(x); };
      else if (name == "abs") fn = [](double x) { return std::abs(x); };
      else fail("unknown name '" + name + "'");
      if (!eat('(')) fail("expected '(' after " + name);
      Fn arg = sum();
      if (!eat(')')) fail("missing ')'");
      return [fn, arg](double t) { return fn(arg(t)); };
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string s_;
  std::size_t pos_ = 0;
};

Smooth from_expression(const std::string& expr) {
  Fn f = ExprParser(expr).parse();
  return {f, [f](double t) { return central_d1(f, t); },
          [f](double t) { return central_d2(f, t); }};
}

Smooth constant_fn(double c) {
  return {[c](double) { return c; }, [](double) { return 0.0; },
          [](double) { return 0.0; }};
}

}  // namespace

double central_d1(const Fn& f, double t, double h_rel) {
  const double h = h_rel * (1.0 + t);
  // One-sided near t = 0 so we never leave the domain.
  if (t - h < 0.0) {
    return (-3.0 * f(t) + 4.0 * f(t + h) - f(t + 2.0 * h)) / (2.0 * h);
  }
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

double central_d2(const Fn& f, double t, double h_rel) {
  const double h = h_rel * (1.0 + t);
  if (t - h < 0.0) {
    return (2.0 * f(t) - 5.0 * f(t + h) + 4.0 * f(t + 2.0 * h) - f(t + 3.0 * h)) / (h * h);
  }
  return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
}

SpeedLaw speed_constant() {
  SpeedLaw s{"constant", constant_fn(1.0), [](double t) { return 1.0 + t; }, 1.0, {{"alpha", 0.0}}};
  return s;
}

SpeedLaw speed_polynomial(double ell) {
  if (!(ell > -1.0)) throw DomainError("polynomial speed needs ell > -1");
  SpeedLaw s;
  s.name = "polynomial";
  s.params = {{"ell", ell}};
  s.a = {[ell](double t) { return std::pow(1.0 + t, ell); },
         [ell](double t) { return ell * std::pow(1.0 + t, ell - 1.0); },
         [ell](double t) { return ell * (ell - 1.0) * std::pow(1.0 + t, ell - 2.0); }};
  s.A = [ell](double t) {
    return 1.0 + std::expm1((ell + 1.0) * std::log1p(t)) / (ell + 1.0);
  };
  return s;
}

SpeedLaw speed_exponential() {
  SpeedLaw s;
  s.name = "exponential";
  s.params = {{"alpha", 1.0}};
  auto e = [](double t) { return std::exp(t); };
  s.a = {e, e, e};
  s.A = e;
  return s;
}

SpeedLaw speed_scale_invariant(double alpha, double A0) {
  if (!(A0 > 0.0 && A0 <= 1.0)) throw DomainError("scale-invariant speed needs A0 in (0, 1]");
  if (alpha > 1.0) {
    throw DomainError("scale-invariant speed with alpha > 1 reaches A = infinity in finite time");
  }
  SpeedLaw s;
  s.name = "scale_invariant";
  s.A0 = A0;
  s.params = {{"alpha", alpha}, {"A0", A0}};
  std::function<double(double)> A;
  if (alpha == 1.0) {
    A = [A0](double t) { return A0 * std::exp(t / A0); };
  } else {
    A = [alpha, A0](double t) {
      // A^(1-alpha) = A0^(1-alpha) + (1-alpha) A0^(-alpha) t
      const double base = 1.0 + (1.0 - alpha) * t / A0;
      return A0 * std::pow(base, 1.0 / (1.0 - alpha));
    };
  }
  s.A = A;
  s.a = {[A, alpha, A0](double t) { return std::pow(A(t) / A0, alpha); },
         [A, alpha, A0](double t) {
           const double At = A(t), a = std::pow(At / A0, alpha);
           return alpha * a * a / At;
         },
         [A, alpha, A0](double t) {
           const double At = A(t), a = std::pow(At / A0, alpha);
           return alpha * (2.0 * alpha - 1.0) * a * a * a / (At * At);
         }};
  return s;
}

SpeedLaw speed_oscillating() {
  SpeedLaw s;
  s.name = "oscillating";
  s.a = {[](double t) { return 2.0 + std::sin(std::exp(t)); },
         [](double t) { return std::cos(std::exp(t)) * std::exp(t); },
         [](double t) {
           const double e = std::exp(t);
           return -std::sin(e) * e * e + std::cos(e) * e;
         }};
  return s;
}

SpeedLaw speed_expression(const std::string& expr) {
  SpeedLaw s;
  s.name = "expression:" + expr;
  s.a = from_expression(expr);
  return s;
}

MassLaw mass_zero() {
  return {"zero", [](const SpeedLaw&) { return constant_fn(0.0); }, {}};
}

MassLaw mass_constant(double mu0) {
  return {"constant", [mu0](const SpeedLaw&) { return constant_fn(mu0); }, {{"mu0", mu0}}};
}

MassLaw mass_power(double mu0, double k) {
  return {"power", [mu0, k](const SpeedLaw&) {
            return Smooth{[mu0, k](double t) { return mu0 * std::pow(1.0 + t, k); },
                          [mu0, k](double t) { return mu0 * k * std::pow(1.0 + t, k - 1.0); },
                          [mu0, k](double t) {
                            return mu0 * k * (k - 1.0) * std::pow(1.0 + t, k - 2.0);
                          }};
          },
          {{"mu0", mu0}, {"k", k}}};
}

namespace {

// eta = a/A and its derivatives, for masses built from the speed law. The
// primitive is passed in so memoized profiles reuse their own cache.
struct EtaParts {
  double eta, d1, d2;
};

EtaParts eta_parts(const Smooth& a, double A, double t) {
  const double av = a.f(t), a1 = a.d1(t), a2 = a.d2(t);
  const double e = av / A;
  const double e1 = a1 / A - av * av / (A * A);
  const double e2 = a2 / A - 3.0 * av * a1 / (A * A) + 2.0 * av * av * av / (A * A * A);
  return {e, e1, e2};
}

Fn primitive_of(const SpeedLaw& s) {
  if (s.A) return s.A;
  // Masses depending on A for non-closed speeds use a private memo.
  auto prof = std::make_shared<CoefficientProfile>(s, mass_zero(), "primitive");
  return [prof](double t) { return prof->primitive(t); };
}

}  // namespace

MassLaw mass_scale_invariant(double mu) {
  return {"scale_invariant", [mu](const SpeedLaw& s) {
            Fn A = primitive_of(s);
            Smooth a = s.a;
            return Smooth{[mu, A, a](double t) { return mu * a.f(t) / A(t); },
                          [mu, A, a](double t) { return mu * eta_parts(a, A(t), t).d1; },
                          [mu, A, a](double t) { return mu * eta_parts(a, A(t), t).d2; }};
          },
          {{"mu", mu}}};
}

MassLaw mass_log(double mu0, double gamma) {
  return {"log", [mu0, gamma](const SpeedLaw&) {
            // m = mu0 g h with g = L^-gamma, L = ln(e+t), h = 1/(e+t)
            auto parts = [mu0, gamma](double t, int k) {
              const double x = std::numbers::e + t;
              const double L = std::log(x);
              const double h = 1.0 / x;
              const double g = std::pow(L, -gamma);
              if (k == 0) return mu0 * g * h;
              const double g1 = -gamma * std::pow(L, -gamma - 1.0) * h;
              const double h1 = -h * h;
              if (k == 1) return mu0 * (g1 * h + g * h1);
              const double g2 = gamma * h * h * std::pow(L, -gamma - 2.0) * ((gamma + 1.0) + L);
              const double h2 = 2.0 * h * h * h;
              return mu0 * (g2 * h + 2.0 * g1 * h1 + g * h2);
            };
            return Smooth{[parts](double t) { return parts(t, 0); },
                          [parts](double t) { return parts(t, 1); },
                          [parts](double t) { return parts(t, 2); }};
          },
          {{"mu0", mu0}, {"gamma", gamma}}};
}

MassLaw mass_oscillating_mu() {
  return {"oscillating_mu", [](const SpeedLaw& s) {
            Fn A = primitive_of(s);
            Smooth a = s.a;
            auto parts = [A, a](double t, int k) {
              const EtaParts e = eta_parts(a, A(t), t);
              const double q = 2.0 + std::sin(t * t);
              if (k == 0) return e.eta * q;
              const double q1 = 2.0 * t * std::cos(t * t);
              if (k == 1) return e.d1 * q + e.eta * q1;
              const double q2 = 2.0 * std::cos(t * t) - 4.0 * t * t * std::sin(t * t);
              return e.d2 * q + 2.0 * e.d1 * q1 + e.eta * q2;
            };
            return Smooth{[parts](double t) { return parts(t, 0); },
                          [parts](double t) { return parts(t, 1); },
                          [parts](double t) { return parts(t, 2); }};
          }, {}};
}

MassLaw mass_expression(const std::string& expr) {
  Smooth m = from_expression(expr);
  return {"expression:" + expr, [m](const SpeedLaw&) { return m; }, {}};
}

// Cumulative primitive at checkpoints c_k = 2^(k/8) - 1.
struct CoefficientProfile::Memo {
  std::mutex lock;
  std::vector<double> cum{1.0};
};

namespace {
double checkpoint(std::size_t k) { return std::exp2(static_cast<double>(k) / 8.0) - 1.0; }
}  // namespace

CoefficientProfile::CoefficientProfile(SpeedLaw speed, MassLaw mass, std::string label)
    : label_(std::move(label)),
      speed_(std::move(speed)),
      mass_(mass.bind(speed_)),
      mass_name_(mass.name),
      mass_params_(mass.params),
      memo_(std::make_shared<Memo>()) {
  if (label_.empty()) label_ = speed_.name + "/" + mass_name_;
  memo_->cum[0] = speed_.A0;
}

CoefficientProfile CoefficientProfile::free_wave() const {
  CoefficientProfile f(speed_, mass_zero(), speed_.name + "/zero");
  f.memo_ = memo_;
  return f;
}

std::optional<double> CoefficientProfile::speed_param(const std::string& key) const {
  auto it = speed_.params.find(key);
  if (it == speed_.params.end()) return std::nullopt;
  return it->second;
}

std::optional<double> CoefficientProfile::mass_param(const std::string& key) const {
  auto it = mass_params_.find(key);
  if (it == mass_params_.end()) return std::nullopt;
  return it->second;
}

double CoefficientProfile::primitive(double t) const {
  if (t < 0.0) throw DomainError("primitive requested at negative time");
  if (speed_.A) return speed_.A(t);
  const auto k = static_cast<std::size_t>(std::floor(8.0 * std::log2(1.0 + t)));
  QuadOptions q;
  q.rel_tol = 1e-12;
  double base;
  {
    std::lock_guard<std::mutex> g(memo_->lock);
    auto& cum = memo_->cum;
    while (cum.size() <= k) {
      const std::size_t j = cum.size();
      cum.push_back(cum.back() + integrate(speed_.a.f, checkpoint(j - 1), checkpoint(j), q));
    }
    base = cum[k];
  }
  const double ck = checkpoint(k);
  if (t <= ck) return base;
  return base + integrate(speed_.a.f, ck, t, q);
}

double CoefficientProfile::primitive_inverse(double y, double tol) const {
  if (y < A0()) throw DomainError("primitive_inverse: target below A(0)");
  if (y == A0()) return 0.0;
  double hi = 1.0;
  while (primitive(hi) < y) {
    hi *= 2.0;
    if (hi > 1e15) throw NumericalError("primitive_inverse: target not reached");
  }
  return bisect([&](double t) { return primitive(t) - y; }, 0.0, hi, tol);
}

std::pair<double, double> CoefficientProfile::eta_mu(double t) const {
  const double A = primitive(t);
  const double av = a(t);
  return {av / A, m(t) * A / av};
}

double CoefficientProfile::mu1(double t) const {
  // mu = m g with g = A/a
  const double A = primitive(t), av = a(t), ap = a1(t);
  const double g = A / av;
  const double g1 = 1.0 - A * ap / (av * av);
  return m1(t) * g + m(t) * g1;
}

double CoefficientProfile::mu2(double t) const {
  const double A = primitive(t), av = a(t), ap = a1(t), app = a2(t);
  const double g = A / av;
  const double g1 = 1.0 - A * ap / (av * av);
  const double g2 = -ap / av - A * app / (av * av) + 2.0 * A * ap * ap / (av * av * av);
  return m2(t) * g + 2.0 * m1(t) * g1 + m(t) * g2;
}

double CoefficientProfile::omega(double t, double xi) const {
  const double av = a(t), mv = m(t);
  return std::sqrt(xi * xi * av * av + mv * mv);
}

double CoefficientProfile::omega1(double t, double xi) const {
  const double av = a(t), mv = m(t);
  const double w = std::sqrt(xi * xi * av * av + mv * mv);
  if (w == 0.0) return 0.0;
  return (xi * xi * av * a1(t) + mv * m1(t)) / w;
}

double CoefficientProfile::omega2(double t, double xi) const {
  const double av = a(t), ap = a1(t), mv = m(t), mp = m1(t);
  const double w = std::sqrt(xi * xi * av * av + mv * mv);
  if (w == 0.0) return 0.0;
  const double w1 = (xi * xi * av * ap + mv * mp) / w;
  return (xi * xi * (ap * ap + av * a2(t)) + mp * mp + mv * m2(t) - w1 * w1) / w;
}

std::vector<std::string> CoefficientProfile::normalization_warnings() const {
  std::vector<std::string> w;
  if (std::abs(a(0.0) - 1.0) > 1e-12) w.push_back("a(0) = " + std::to_string(a(0.0)) + " != 1");
  const double m0 = m(0.0);
  if (m0 != 0.0 && std::abs(m0 - 1.0) > 1e-12) {
    w.push_back("m(0) = " + std::to_string(m0) + " != 1");
  }
  return w;
}

bool HypothesisReport::satisfied() const {
  return std::all_of(clauses.begin(), clauses.end(),
                     [](const ClauseResult& c) { return c.satisfied; });
}

nlohmann::json to_json(const HypothesisReport& r) {
  nlohmann::json j;
  j["hypothesis"] = r.hypothesis;
  j["satisfied"] = r.satisfied();
  for (const auto& c : r.clauses) {
    j["clauses"].push_back({{"name", c.name},
                            {"constant", c.constant},
                            {"worst_t", c.worst_t},
                            {"satisfied", c.satisfied},
                            {"heuristic", c.heuristic}});
  }
  j["grid"] = {{"lo", r.grid.empty() ? 0.0 : r.grid.front()},
               {"hi", r.grid.empty() ? 0.0 : r.grid.back()},
               {"size", r.grid.size()}};
  j["notes"] = r.notes;
  return j;
}

std::vector<double> linear_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / std::max(1, n - 1);
  return g;
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  const double l0 = std::log1p(lo), l1 = std::log1p(hi);
  for (int i = 0; i < n; ++i) g[i] = std::expm1(l0 + (l1 - l0) * i / std::max(1, n - 1));
  return g;
}

namespace {

void validate_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw DomainError("probe grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end())) throw DomainError("probe grid is not sorted");
  if (grid.front() < 0.0) throw DomainError("probe grid has negative times");
}

ClauseResult sup_clause(const std::string& name, const std::vector<double>& grid,
                        const std::function<double(double)>& ratio, double cap) {
  ClauseResult c;
  c.name = name;
  c.worst_t = grid.front();
  for (double t : grid) {
    const double r = ratio(t);
    if (!std::isfinite(r)) {
      throw NumericalError(name + ": non-finite ratio at t = " + std::to_string(t));
    }
    if (r > c.constant) {
      c.constant = r;
      c.worst_t = t;
    }
  }
  c.satisfied = c.constant <= cap;
  return c;
}

}  // namespace

HypothesisReport check_hypothesis1(const CoefficientProfile& p, const std::vector<double>& grid,
                                   const HypothesisOptions& opt) {
  validate_grid(grid);
  HypothesisReport r;
  r.hypothesis = "H1";
  r.grid = grid;
  r.clauses.push_back(sup_clause("|a'|/(a eta)", grid, [&](double t) {
    const double av = p.a(t);
    return std::abs(p.a1(t)) / (av * p.eta(t));
  }, opt.cap));
  r.clauses.push_back(sup_clause("|a''|/(a eta^2)", grid, [&](double t) {
    const double av = p.a(t), e = p.eta(t);
    return std::abs(p.a2(t)) / (av * e * e);
  }, opt.cap));
  ClauseResult pos{"a > 0", 0.0, grid.front(), true, false};
  for (double t : grid) {
    if (!(p.a(t) > 0.0)) {
      pos.satisfied = false;
      pos.worst_t = t;
      break;
    }
  }
  r.clauses.push_back(pos);
  ClauseResult l1{"a not in L1", p.primitive(grid.back()), grid.back(), false, true};
  l1.satisfied = l1.constant >= opt.A_threshold;
  r.clauses.push_back(l1);
  r.notes.push_back("a not in L1 is probed by A(T) >= " + std::to_string(opt.A_threshold) +
                    " (heuristic)");
  for (auto& w : p.normalization_warnings()) r.notes.push_back(w);
  return r;
}

HypothesisReport check_hypothesis2(const CoefficientProfile& p, const std::vector<double>& grid,
                                   const HypothesisOptions& opt) {
  validate_grid(grid);
  HypothesisReport r;
  r.hypothesis = "H2";
  r.grid = grid;
  r.clauses.push_back(sup_clause("|mu'|/(mu eta)", grid, [&](double t) {
    const auto [e, mu] = p.eta_mu(t);
    if (mu == 0.0) return 0.0;
    return std::abs(p.mu1(t)) / (mu * e);
  }, opt.cap));
  r.clauses.push_back(sup_clause("|mu''|/(mu eta^2)", grid, [&](double t) {
    const auto [e, mu] = p.eta_mu(t);
    if (mu == 0.0) return 0.0;
    return std::abs(p.mu2(t)) / (mu * e * e);
  }, opt.cap));
  ClauseResult pos{"mu > 0", 0.0, grid.front(), true, false};
  for (double t : grid) {
    if (!(p.mu(t) > 0.0)) {
      pos.satisfied = false;
      pos.worst_t = t;
      break;
    }
  }
  r.clauses.push_back(pos);
  return r;
}

}  // namespace kgspec
