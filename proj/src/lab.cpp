#include "kgspec/lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "kgspec/classify.hpp"
#include "kgspec/modes.hpp"
#include "kgspec/scatter.hpp"
#include "kgspec/semilinear.hpp"

namespace kgspec {

const char* const kVersion = "kgspec 1.0.0";

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

using Columns = std::vector<std::pair<std::string, std::vector<double>>>;

// CSV with a header row and the same table as whitespace columns for gnuplot.
void write_table(const fs::path& dir, const std::string& stem, const Columns& cols) {
  if (cols.empty()) return;
  std::size_t rows = 0;
  for (const auto& c : cols) rows = std::max(rows, c.second.size());
  std::ofstream csv(dir / (stem + ".csv")), dat(dir / (stem + ".dat"));
  dat << "#";
  for (std::size_t j = 0; j < cols.size(); ++j) {
    csv << (j ? "," : "") << cols[j].first;
    dat << " " << cols[j].first;
  }
  csv << "\n";
  dat << "\n";
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const auto& v = cols[j].second;
      const std::string s = i < v.size() ? fmt(v[i]) : "nan";
      csv << (j ? "," : "") << s;
      dat << (j ? " " : "") << s;
    }
    csv << "\n";
    dat << "\n";
  }
}

// FNV-1a, stable across platforms, for run names derived from the config text.
std::string digest(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 8);
}

struct Run {
  const ExperimentConfig& cfg;
  fs::path dir;
  nlohmann::json summary;
  std::vector<Check> checks;
  ExecutionPolicy policy;

  void check(const std::string& name, bool ok, const std::string& detail) {
    checks.push_back({name, ok, detail});
  }
  void table(const std::string& stem, const Columns& cols) { write_table(dir, stem, cols); }
};

std::vector<double> sample_times(double T, int samples) {
  auto g = geometric_grid(0.0, T, samples);
  g.insert(g.begin(), 0.0);
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

void run_classify(Run& r) {
  const auto& c = r.cfg.raw;
  auto p = profile_from_config(c);
  const double T = r.cfg.horizon(1e6);
  auto cl = classify(p, T, c.num("tol", 0.05));
  r.summary["kind"] = to_string(cl.kind);
  r.summary["classification"] = to_json(cl);
  if (c.has("expect_kind")) {
    const std::string want = c.str("expect_kind");
    r.check("kind", to_string(cl.kind) == want, to_string(cl.kind) + " (expected " + want + ")");
  }
}

void run_simulate(Run& r) {
  const auto& c = r.cfg.raw;
  auto p = profile_from_config(c);
  const int n = static_cast<int>(c.integer("n", 1));
  const double T = r.cfg.horizon(100.0);
  auto m = gaussian_measure(r.cfg.xi.lo, r.cfg.xi.hi, r.cfg.xi.count, n, c.num("xi_width", 1e300));
  const double u1 = c.num("u1_amp", 0.0), u0 = c.num("u0_amp", 1.0);
  for (std::size_t i = 0; i < m.xi.size(); ++i) {
    m.u1[i] = m.u0[i] * u1;
    m.u0[i] *= u0;
  }
  ModeOptions mo;
  mo.tol = c.num("ode_tol", 1e-10);
  const auto times = sample_times(T, static_cast<int>(c.integer("samples", 200)));
  auto tr = sweep_modes(p, m, times, mo, r.policy);
  std::optional<PsiProfile> psi;
  if (c.flag("psi", false)) psi = build_psi(p);
  auto e = assemble_energies(tr, p, psi, m.weight);
  std::vector<double> gamma(times.size()), mass(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    mass[i] = p.m(times[i]);
    gamma[i] = std::max(p.a(times[i]), mass[i]);
  }
  Columns cols{{"t", e.t}, {"E_am", e.E_am}, {"E_eff", e.E_eff}, {"potential", e.potential},
               {"kinetic", e.kinetic}, {"gamma", gamma}};
  if (!e.E_p.empty()) cols.push_back({"E_p", e.E_p});
  r.table("energies", cols);
  if (c.flag("save_trajectories", true)) {
    Columns tc{{"xi", {}}, {"t", {}}, {"re_u", {}}, {"im_u", {}}, {"re_ut", {}}, {"im_ut", {}}};
    for (const auto& m1 : tr) {
      for (std::size_t k = 0; k < m1.times.size(); ++k) {
        const double row[] = {m1.xi, m1.times[k], m1.u[k].real(), m1.u[k].imag(), m1.ut[k].real(), m1.ut[k].imag()};
        for (std::size_t j = 0; j < 6; ++j) tc[j].second.push_back(row[j]);
      }
    }
    r.table("trajectories", tc);
  }
  r.summary["modes"] = m.xi.size();
  r.summary["samples"] = times.size();

  if (c.has("check_conservation")) {
    double dev = 0.0;
    for (double v : e.E_am) dev = std::max(dev, std::abs(v - e.E_am[0]) / e.E_am[0]);
    r.summary["conservation_deviation"] = dev;
    r.check("conservation", dev <= c.num("check_conservation"),
            "max |E(t)-E(0)|/E(0) = " + short_num(dev));
  }
  const double rate_tol = c.num("rate_tol", 0.05);
  if (c.has("check_energy_exponent_max")) {
    auto f = fit_rate(e.t, e.E_eff, FitModel::Power);
    r.summary["energy_fit"] = to_json(f);
    const double bound = c.num("check_energy_exponent_max");
    r.check("energy exponent", f.status != FitStatus::Inconclusive && f.exponent <= bound + rate_tol,
            "fitted " + short_num(f.exponent) + " <= " + short_num(bound) + " + " +
                short_num(rate_tol) + " (rms " + short_num(f.residual) + ")");
  }
  if (c.has("check_energy_ratio_max")) {
    const double lo = (1.0 + T) / 10.0 - 1.0;
    double mx = 0.0, mn = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < e.t.size(); ++i) {
      if (e.t[i] < lo) continue;
      const double q = e.E_eff[i] / gamma[i];
      mx = std::max(mx, q);
      mn = std::min(mn, q);
    }
    r.summary["energy_over_gamma"] = {{"max", mx}, {"min", mn}};
    r.check("E/gamma spread", mn > 0.0 && mx / mn <= c.num("check_energy_ratio_max"),
            "max/min = " + short_num(mx / mn) + " over the final decade");
  }
  if (c.has("check_potential_vs_mass")) {
    auto fu = fit_rate(e.t, e.potential, FitModel::Power);
    auto fm = fit_rate(e.t, mass, FitModel::Power);
    r.summary["potential_fit"] = to_json(fu);
    r.summary["mass_fit"] = to_json(fm);
    const double tol = c.num("check_potential_vs_mass");
    r.check("potential vs 1/m",
            fu.status != FitStatus::Inconclusive && fu.exponent <= -fm.exponent + tol,
            "||u||^2 exponent " + short_num(fu.exponent) + " <= -(" + short_num(fm.exponent) +
                ") + " + short_num(tol));
  }
}

ScaleInvariantModel model_from(const Config& c) {
  if (c.has("ell")) return ScaleInvariantModel::from_polynomial(c.num("ell"), c.num("mutilde", 0.0));
  return ScaleInvariantModel::from_alpha_mu(c.num("alpha"), c.num("mu"), c.num("A0", 1.0));
}

void run_rates(Run& r) {
  const auto& c = r.cfg.raw;
  auto m = model_from(c);
  auto pred = predict_rates(m, c.num("q", 2.0), c.num("kappa", 0.0),
                            static_cast<int>(c.integer("n", 1)));
  r.summary["model"] = {{"alpha", m.alpha}, {"mu", m.mu}, {"A0", m.A0}, {"delta", m.delta}};
  r.summary["dissipative"] = to_json(transform_to_dissipative(m));
  r.summary["prediction"] = to_json(pred);
  if (!c.flag("verify", false)) return;
  RateSimConfig sim;
  sim.horizon = r.cfg.horizon(1e3);
  sim.samples = static_cast<int>(c.integer("samples", 120));
  sim.tolerance = c.num("rate_tol", 0.05);
  sim.rms_gate = c.num("rms_gate", 0.05);
  sim.mode.tol = c.num("ode_tol", 1e-10);
  sim.data = rate_probe_measure(m, sim.horizon, static_cast<int>(c.integer("probe_count", 24)));
  auto rep = verify_rates(m, pred, sim, r.policy);
  r.summary["verification"] = to_json(rep);
  {
    std::ofstream out(r.dir / "fits.csv");
    out << "quantity,fitted,predicted,rms,lo,hi,samples,status\n";
    for (const auto* rc : {&rep.potential, &rep.kinetic}) {
      out << rc->quantity << "," << fmt(rc->fitted) << "," << fmt(rc->predicted) << ","
          << fmt(rc->fit.rms) << "," << fmt(rc->fit.lo) << "," << fmt(rc->fit.hi) << ","
          << rc->fit.samples << "," << to_string(rc->status) << "\n";
    }
  }
  for (const auto* rc : {&rep.potential, &rep.kinetic}) {
    r.check(rc->quantity + " exponent", rc->status == FitStatus::Pass,
            "fitted " + short_num(rc->fitted) + " vs " + short_num(rc->predicted) + " (" +
                to_string(rc->status) + ", rms " + short_num(rc->fit.rms) + ")");
  }
}

void run_scatter(Run& r) {
  const auto& c = r.cfg.raw;
  auto p = profile_from_config(c);
  ScatterOptions o;
  o.N = r.cfg.N;
  o.test_mode = c.flag("test_mode", false);
  o.horizon = r.cfg.horizon(1e4);
  o.ode_tol = c.num("ode_tol", 1e-12);
  const double eps = c.num("eps", 0.1), tol = c.num("tol", 1e-10);
  const double lo = c.num("fit_lo", 100.0), hi = c.num("fit_hi", o.horizon);
  const auto xi = r.cfg.xi.values();
  nlohmann::json samples = nlohmann::json::array();
  for (double x : xi) {
    auto w = wave_operator(p, x, eps, tol, o);
    double rms = 0.0;
    const double slope = loglog_slope(w.t, w.multiplier_residual, lo, hi, &rms);
    auto j = to_json(w);
    j["residual_slope"] = slope;
    j["residual_slope_rms"] = rms;
    samples.push_back(j);
    r.table("wave_operator_xi_" + short_num(x),
            {{"t", w.t}, {"multiplier_residual", w.multiplier_residual},
             {"q_residual", w.q_residual}, {"bound", w.bound}});
    if (c.has("expect_slope")) {
      const double want = c.num("expect_slope"), st = c.num("slope_tol", 0.1);
      r.check("residual slope xi=" + short_num(x), std::abs(slope - want) <= st,
              "slope " + short_num(slope) + " vs " + short_num(want) + " +- " + short_num(st));
    }
  }
  r.summary["wave_operator"] = samples;
  if (c.flag("discrepancy", false)) {
    std::vector<double> probe;
    const double plo = c.num("probe_lo", 100.0), phi = c.num("probe_hi", 1000.0);
    for (double t = plo; t <= phi * (1.0 + 1e-12); t *= 1.1) probe.push_back(t);
    auto band = gaussian_measure(c.num("band_lo", 1.0), c.num("band_hi", 2.0),
                                 static_cast<int>(c.integer("band_count", 12)), 1, 1e300);
    for (auto& v : band.u1) v = cplx(c.num("band_u1", 0.5), 0.0);
    auto curve = asymptotic_equivalence(p, band, c.num("band_eps", 0.5), probe, tol, o, r.policy);
    const double slope = loglog_slope(curve.t, curve.value, plo, phi);
    r.summary["discrepancy_slope"] = slope;
    r.table("discrepancy", {{"t", curve.t}, {"value", curve.value}});
    if (c.has("expect_slope")) {
      const double want = c.num("expect_slope"), st = c.num("discrepancy_tol", 0.2);
      r.check("discrepancy slope", std::abs(slope - want) <= st,
              "slope " + short_num(slope) + " vs " + short_num(want) + " +- " + short_num(st));
    }
  }
}

void run_semilinear(Run& r) {
  const auto& c = r.cfg.raw;
  const int n = static_cast<int>(c.integer("n", 2));
  const int M = static_cast<int>(c.integer("M", 256));
  const double sigma = c.num("sigma", 45.0);
  const Grid g = c.has("L") ? Grid{n, M, c.num("L")} : resolving_grid(n, M, sigma);
  auto data = gaussian_data(g, sigma, c.num("u0_amp", 1.0), c.num("u1_amp", 0.5),
                            c.flag("mean_free", false));
  scale_to_d1(data, c.num("eps", 1e-3));
  SemilinearOptions o;
  o.p = c.num("p", 2.0);
  o.m = c.num("m", 1.0);
  o.horizon = r.cfg.horizon(8.0);
  o.tol = c.num("tol", o.tol);
  o.nonlinear = c.flag("nonlinear", true);
  o.max_step = c.num("max_step", o.max_step);
  o.step_phase = c.num("step_phase", o.step_phase);
  o.alias_tol = c.num("alias_tol", o.alias_tol);
  o.gn_times = {1.0, 0.5 * o.horizon, o.horizon};
  auto res = solve_semilinear(data, o, r.policy);
  r.summary["grid"] = {{"n", g.n}, {"M", g.M}, {"L", g.L}};
  r.summary["result"] = to_json(res);
  r.summary["result"].erase("series");
  r.table("norms", {{"t", res.t}, {"u_l2", res.u_l2}, {"grad_l2", res.grad_l2},
                    {"ut_l2", res.ut_l2}, {"x_norm", res.ledger.samples},
                    {"x_norm_sup", res.ledger.sup_so_far}});

  const double lo = c.num("fit_lo", o.horizon - std::log(10.0));
  auto f = fit_rate(res.t, res.u_l2, FitModel::Exp, c.num("expect_decay", -0.5),
                    c.num("decay_tol", 0.05), std::make_pair(lo, o.horizon),
                    c.num("rms_gate", 0.02));
  r.summary["decay_fit"] = to_json(f);
  if (c.has("expect_decay")) {
    r.check("decay exponent", f.pass(),
            "fitted " + short_num(f.exponent) + " vs " + short_num(f.predicted) + " +- " +
                short_num(f.tolerance) + " (rms " + short_num(f.residual) + ")");
  }
  const double factor = c.num("ledger_factor", 10.0);
  const double s1 = res.ledger.sup_until(1.0), sup = res.ledger.sup();
  r.check("X-norm ledger", sup <= factor * s1,
          "sup " + short_num(sup) + " <= " + short_num(factor) + " x " + short_num(s1));
  if (o.nonlinear) {
    r.check("Picard consistency", res.picard_residual <= o.tol,
            "residual " + short_num(res.picard_residual) + " <= " + short_num(o.tol));
  }
  r.check("decay constants", res.decay_bounds_ok(),
          "kinetic " + short_num(res.kinetic_constant) + " (t<=1: " +
              short_num(res.kinetic_constant_t1) + "), potential " +
              short_num(res.potential_constant) + " (t<=1: " +
              short_num(res.potential_constant_t1) + ")");
  r.check("Gagliardo-Nirenberg", res.gn_ok(), std::to_string(res.gn.size()) + " constants");
}

void run_verify(Run& r) {
  const auto& c = r.cfg.raw;
  std::vector<int> ids;
  if (c.str("criterion", "") == "all") {
    for (int k = 1; k <= criterion_count(); ++k) ids.push_back(k);
  } else {
    ids.push_back(static_cast<int>(c.integer("criterion", 0)));
  }
  nlohmann::json lines = nlohmann::json::array();
  for (int id : ids) {
    auto res = run_criterion(id, c, r.policy);
    std::string prefix = ids.size() > 1 ? "criterion " + std::to_string(id) + " " : "";
    if (ids.size() == 1) {
      r.summary["criterion"] = id;
      r.summary["title"] = res.title;
      r.summary["data"] = res.data;
    } else {
      r.summary["criteria"][std::to_string(id)] = {{"title", res.title}, {"data", res.data}};
    }
    lines.push_back(res.line());
    for (auto ch : res.checks) {
      ch.name = prefix + ch.name;
      r.checks.push_back(ch);
    }
  }
  r.summary["lines"] = lines;
}

}  // namespace

std::vector<double> XiGrid::values() const {
  if (count == 1) return {lo};
  std::vector<double> v(count);
  const double r = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) v[i] = lo * std::exp(r * i);
  v.back() = hi;
  return v;
}

ExperimentConfig ExperimentConfig::from_config(const Config& c, const std::string& pipeline) {
  ExperimentConfig e;
  e.raw = c;
  e.pipeline = pipeline.empty() ? c.str("pipeline", "") : pipeline;
  e.raw.set("pipeline", e.pipeline);
  e.name = c.str("name", "");
  e.N = c.num("N", 10.0);
  e.xi.lo = c.num("xi_lo", e.xi.lo);
  e.xi.hi = c.num("xi_hi", e.xi.hi);
  e.xi.count = static_cast<int>(c.integer("xi_count", e.xi.count));
  if (c.has("xi")) {
    auto v = c.list("xi");
    if (!v.empty()) {
      e.xi.lo = v.front();
      e.xi.hi = v.back();
      e.xi.count = static_cast<int>(v.size());
    }
  }
  if (c.has("horizons")) e.horizons = c.list("horizons");
  else if (c.has("horizon")) e.horizons = {c.num("horizon")};
  for (const auto& [k, v] : c.values()) {
    const bool tolkey = k == "tol" || (k.size() > 4 && k.compare(k.size() - 4, 4, "_tol") == 0);
    if (tolkey) e.tolerances.emplace_back(k, c.num(k));
  }
  e.out_dir = c.str("out", default_output_root());
  e.seed = static_cast<std::uint64_t>(c.integer("seed", 0));
  return e;
}

void ExperimentConfig::validate() const {
  std::vector<std::string> bad;
  static const std::vector<std::string> known{"classify", "simulate", "rates",
                                              "scatter",  "semilinear", "verify"};
  if (std::find(known.begin(), known.end(), pipeline) == known.end())
    bad.push_back("unknown pipeline '" + pipeline + "'");
  for (const auto& [k, v] : tolerances)
    if (!(v > 0.0)) bad.push_back("tolerance " + k + " must be positive");
  if (!(xi.lo > 0.0) || !(xi.hi >= xi.lo) || xi.count < 1 || (xi.count > 1 && xi.hi == xi.lo))
    bad.push_back("xi grid must be positive and increasing");
  if (raw.has("xi")) {
    auto v = raw.list("xi");
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] > 0.0) || (i > 0 && !(v[i] > v[i - 1]))) {
        bad.push_back("xi list must be positive and strictly increasing");
        break;
      }
    }
  }
  for (double h : horizons)
    if (!(h > 0.0)) bad.push_back("horizons must be positive");
  if (!(N > 0.0)) bad.push_back("zone constant N must be positive");
  if (out_dir.empty()) bad.push_back("output directory is empty");
  if (!bad.empty()) {
    std::string msg = "invalid experiment config:";
    for (const auto& b : bad) msg += " " + b + ";";
    throw DomainError(msg);
  }
}

std::string default_output_root() {
  const char* env = std::getenv("KGSPEC_OUT");
  return env && *env ? env : "runs";
}

std::string to_string(FitModel m) {
  switch (m) {
    case FitModel::Power: return "power";
    case FitModel::Exp: return "exp";
    case FitModel::PowerLog: return "power_log";
  }
  return "?";
}

FitModel fit_model_from_string(const std::string& s) {
  if (s == "power") return FitModel::Power;
  if (s == "exp") return FitModel::Exp;
  if (s == "power_log") return FitModel::PowerLog;
  throw DomainError("unknown fit model '" + s + "'");
}

RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& y, FitModel model,
                 double predicted, double tolerance, std::optional<std::pair<double, double>> window,
                 double gate) {
  if (t.size() != y.size()) throw DomainError("fit_rate: series lengths differ");
  RateFit f;
  f.model = model;
  f.predicted = predicted;
  f.tolerance = tolerance;
  f.gate = gate;
  if (t.empty()) {
    f.note = "empty series";
    return f;
  }
  const double T = *std::max_element(t.begin(), t.end());
  if (window) {
    f.lo = window->first;
    f.hi = window->second;
  } else if (model == FitModel::Exp) {
    f.lo = T / 10.0;
    f.hi = T;
  } else {
    f.lo = (1.0 + T) / 10.0 - 1.0;
    f.hi = T;
  }
  std::vector<double> x1, x2, ly, one;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < f.lo || t[i] > f.hi) continue;
    if (!(y[i] > 0.0)) {
      f.note = "non-positive sample in the window";
      return f;
    }
    x1.push_back(model == FitModel::Exp ? t[i] : std::log1p(t[i]));
    x2.push_back(std::log(std::log(std::numbers::e + t[i])));
    ly.push_back(std::log(y[i]));
    one.push_back(1.0);
  }
  f.samples = static_cast<int>(ly.size());
  if (f.samples < 20) {
    f.note = "fewer than 20 samples in the window";
    return f;
  }
  const auto to_x = [&](double v) { return model == FitModel::Exp ? v : std::log1p(v); };
  const double width = to_x(f.hi) - to_x(f.lo);
  const auto [x_lo, x_hi] = std::minmax_element(x1.begin(), x1.end());
  if (width < std::log(10.0) * (1.0 - 1e-12) || *x_hi - *x_lo < 0.9 * width) {
    f.note = "samples span less than a decade";
    return f;
  }
  std::vector<std::vector<double>> cols{one, x1};
  if (model == FitModel::PowerLog) cols.push_back(x2);
  const auto beta = least_squares(cols, ly, &f.residual);
  f.exponent = beta[1];
  if (model == FitModel::PowerLog) f.log_power = beta[2];
  const bool gate_ok = f.residual <= gate;
  if (std::isnan(predicted)) {
    f.status = gate_ok ? FitStatus::Pass : FitStatus::Fail;
  } else {
    f.status = gate_ok && std::abs(f.exponent - predicted) <= tolerance ? FitStatus::Pass
                                                                          : FitStatus::Fail;
  }
  if (!gate_ok) f.note = "residual above the gate";
  return f;
}

nlohmann::json to_json(const RateFit& f) {
  nlohmann::json j{{"model", to_string(f.model)}, {"exponent", f.exponent},
                   {"residual", f.residual},      {"window", {f.lo, f.hi}},
                   {"samples", f.samples},        {"tolerance", f.tolerance},
                   {"gate", f.gate},              {"status", to_string(f.status)}};
  j["predicted"] = std::isnan(f.predicted) ? nlohmann::json() : nlohmann::json(f.predicted);
  if (f.model == FitModel::PowerLog) j["log_power"] = f.log_power;
  if (!f.note.empty()) j["note"] = f.note;
  return j;
}

RunResult run_experiment(const ExperimentConfig& c, ExecutionPolicy policy) {
  c.validate();
  const std::string canon = c.raw.dump();
  const std::string name = c.name.empty() ? c.pipeline + "-" + digest(canon) : c.name;
  Run r{c, fs::path(c.out_dir) / name, {}, {}, policy};
  fs::create_directories(r.dir);
  {
    std::ofstream(r.dir / "config.cfg") << canon;
  }
  r.summary["pipeline"] = c.pipeline;
  r.summary["version"] = kVersion;
  r.summary["seed"] = c.seed;
  try {
    if (c.pipeline == "classify") run_classify(r);
    else if (c.pipeline == "simulate") run_simulate(r);
    else if (c.pipeline == "rates") run_rates(r);
    else if (c.pipeline == "scatter") run_scatter(r);
    else if (c.pipeline == "semilinear") run_semilinear(r);
    else if (c.pipeline == "verify") run_verify(r);
  } catch (const std::exception& e) {
    r.summary["error"] = {{"pipeline", c.pipeline}, {"what", e.what()}};
    r.check("completed", false, e.what());
  }
  nlohmann::json checks = nlohmann::json::array();
  bool ok = true;
  for (const auto& ch : r.checks) {
    checks.push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
    ok = ok && ch.passed;
  }
  r.summary["checks"] = checks;
  r.summary["passed"] = ok;
  {
    std::ofstream(r.dir / "summary.json") << r.summary.dump(2) << "\n";
  }
  return {r.dir.string(), r.summary, r.checks, ok};
}

}  // namespace kgspec
