#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "kgspec/lab.hpp"

using namespace kgspec;

namespace {

struct Overrides {
  std::string config, profile, xi_grid, out, name, policy = "parallel";
  std::vector<std::string> sets;
  std::map<std::string, std::string> values;  // flag -> config key value
  bool verify = false;
};

// "lo:hi:count" (or comma separated), geometric.
void apply_xi_grid(Config& c, const std::string& spec) {
  std::string s = spec;
  for (auto& ch : s)
    if (ch == ',') ch = ':';
  const auto a = s.find(':'), b = s.rfind(':');
  if (a == std::string::npos || a == b) throw DomainError("xi grid must be lo:hi:count, got '" + spec + "'");
  c.set("xi_lo", s.substr(0, a));
  c.set("xi_hi", s.substr(a + 1, b - a - 1));
  c.set("xi_count", s.substr(b + 1));
}

Config build_config(const Overrides& o) {
  Config c = o.config.empty() ? Config{} : Config::load(o.config);
  if (!o.profile.empty()) {
    for (const auto& [k, v] : Config::load(o.profile).values()) c.set(k, v);
  }
  if (!o.xi_grid.empty()) apply_xi_grid(c, o.xi_grid);
  for (const auto& [k, v] : o.values) c.set(k, v);
  if (o.verify) c.set("verify", "true");
  if (!o.out.empty()) c.set("out", o.out);
  if (!o.name.empty()) c.set("name", o.name);
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw DomainError("--set expects key=value, got '" + kv + "'");
    c.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return c;
}

// Numeric flag stored as text so the config keeps the user's spelling.
void flag(CLI::App* sub, Overrides& o, const std::string& name, const std::string& key,
          const std::string& help) {
  sub->add_option_function<std::string>(name, [&o, key](const std::string& v) { o.values[key] = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Klein-Gordon spectral lab"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Overrides o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "config file (key = value)");
    sub->add_option("--out", o.out, "output root (default $KGSPEC_OUT or runs)");
    sub->add_option("--name", o.name, "run directory name");
    sub->add_option("--set", o.sets, "extra key=value overrides")->allow_extra_args(false);
    sub->add_option("--policy", o.policy, "serial or parallel")->check(CLI::IsMember({"serial", "parallel"}));
  };

  auto* classify = app.add_subcommand("classify", "classify a coefficient profile");
  common(classify);
  classify->add_option("--profile", o.profile, "profile file");
  flag(classify, o, "--tmax", "horizon", "probe horizon");
  flag(classify, o, "--expect-kind", "expect_kind", "assert the class");

  auto* simulate = app.add_subcommand("simulate", "mode sweep and energies");
  common(simulate);
  simulate->add_option("--profile", o.profile, "profile file");
  simulate->add_option("--xi-grid", o.xi_grid, "lo:hi:count");
  flag(simulate, o, "--tmax", "horizon", "horizon");

  auto* rates = app.add_subcommand("rates", "scale-invariant rate prediction");
  common(rates);
  flag(rates, o, "--alpha", "alpha", "a'/a = alpha a/A");
  flag(rates, o, "--mu", "mu", "m = mu a/A");
  flag(rates, o, "--ell", "ell", "polynomial form a = (1+t)^ell");
  flag(rates, o, "--mutilde", "mutilde", "polynomial form m = mutilde/(1+t)");
  flag(rates, o, "--q", "q", "data in L^q");
  flag(rates, o, "--kappa", "kappa", "H^kappa regularity");
  flag(rates, o, "--n", "n", "space dimension");
  rates->add_flag("--verify", o.verify, "fit the rates on simulated modes");

  auto* scatter = app.add_subcommand("scatter", "wave operator and residual slopes");
  common(scatter);
  scatter->add_option("--profile", o.profile, "profile file");
  scatter->add_option("--xi-grid", o.xi_grid, "lo:hi:count");
  flag(scatter, o, "--eps", "eps", "low-frequency cutoff");

  auto* semi = app.add_subcommand("semilinear", "small-data semilinear problem");
  common(semi);
  flag(semi, o, "--n", "n", "space dimension");
  flag(semi, o, "--p", "p", "power of |u|^p");
  flag(semi, o, "--m", "m", "mass");
  flag(semi, o, "--eps", "eps", "D1 norm of the data");
  flag(semi, o, "--horizon", "horizon", "final time");

  auto* verify = app.add_subcommand("verify", "acceptance criteria");
  common(verify);
  flag(verify, o, "--criterion", "criterion", "criterion number or all");

  CLI11_PARSE(app, argc, argv);

  const std::string pipeline = app.get_subcommands().front()->get_name();
  try {
    const Config c = build_config(o);
    auto e = ExperimentConfig::from_config(c, pipeline);
    e.validate();
    const auto policy = o.policy == "serial" ? ExecutionPolicy::Serial : ExecutionPolicy::Parallel;
    const auto r = run_experiment(e, policy);
    for (const auto& ch : r.checks)
      std::printf("%s %s: %s\n", ch.passed ? "PASS" : "FAIL", ch.name.c_str(), ch.detail.c_str());
    if (r.summary.contains("kind")) std::printf("kind: %s\n", r.summary["kind"].get<std::string>().c_str());
    std::printf("run directory: %s\n", r.dir.c_str());
    return r.passed ? 0 : 1;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "kgspec %s: %s\n", pipeline.c_str(), ex.what());
    return 2;
  }
}
