#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kgspec/config.hpp"
#include "kgspec/parallel.hpp"
#include "kgspec/scaleinv.hpp"

namespace kgspec {

extern const char* const kVersion;

/// Geometric xi grid.
struct XiGrid {
  double lo = 0.01, hi = 10.0;
  int count = 32;
  std::vector<double> values() const;
};

struct ExperimentConfig {
  std::string pipeline;  // classify | simulate | rates | scatter | semilinear | verify
  std::string name;      // run directory name; derived from the config when empty
  Config raw;            // every key, including pipeline-specific ones
  double N = 10.0;
  XiGrid xi;
  std::vector<double> horizons;
  std::vector<std::pair<std::string, double>> tolerances;  // keys "tol" or "*_tol"
  std::string out_dir;
  std::uint64_t seed = 0;

  /// `pipeline` overrides the config's own `pipeline` key when non-empty.
  static ExperimentConfig from_config(const Config& c, const std::string& pipeline = "");
  /// Throws DomainError naming every problem.
  void validate() const;
  double horizon(double fallback) const { return horizons.empty() ? fallback : horizons.back(); }
};

/// KGSPEC_OUT when set, otherwise "runs".
std::string default_output_root();

enum class FitModel { Power, Exp, PowerLog };
std::string to_string(FitModel m);
FitModel fit_model_from_string(const std::string& s);

struct RateFit {
  FitModel model = FitModel::Power;
  double exponent = 0.0;
  double log_power = 0.0;  // PowerLog only
  double residual = 0.0;   // RMS in log scale
  double lo = 0.0, hi = 0.0;
  int samples = 0;
  double predicted = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.05;
  double gate = 0.02;
  FitStatus status = FitStatus::Inconclusive;
  std::string note;
  bool pass() const { return status == FitStatus::Pass; }
};

/// Least squares of ln y against ln(1+t) (Power), t (Exp) or ln(1+t) and
/// ln ln(e+t) (PowerLog). The window defaults to the final decade: (1+t) in
/// [(1+T)/10, 1+T] for the power models, t in [T/10, T] for Exp. Fewer than 20
/// samples, or samples spanning less than a decade of (1+t) or of e^t, give
/// Inconclusive. With a predicted
/// exponent, Pass needs |fitted - predicted| <= tolerance and residual <= gate;
/// without one, Pass needs only the gate.
RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& y, FitModel model,
                 double predicted = std::numeric_limits<double>::quiet_NaN(),
                 double tolerance = 0.05, std::optional<std::pair<double, double>> window = {},
                 double gate = 0.02);
nlohmann::json to_json(const RateFit& f);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunResult {
  std::string dir;
  nlohmann::json summary;
  std::vector<Check> checks;
  bool passed = false;
};

/// Runs the configured pipeline and writes <out_dir>/<name>/ with config.cfg,
/// summary.json, CSV series and gnuplot columns. Module errors are recorded in
/// the summary; the run then fails.
RunResult run_experiment(const ExperimentConfig& c,
                         ExecutionPolicy policy = ExecutionPolicy::Parallel);

/// One acceptance criterion evaluated with parameters from `params`
/// (defaults are the acceptance settings). Series go to `series` when given.
struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  nlohmann::json data;
  bool passed() const;
  std::string line() const;  // "criterion k PASS|FAIL title: details"
};

CriterionResult run_criterion(int id, const Config& params,
                              ExecutionPolicy policy = ExecutionPolicy::Parallel);
int criterion_count();

/// Quick in-process property checks (Wronskian, energy identity, homogeneity,
/// transform round trips, Parseval, summary determinism).
std::vector<Check> property_checks(ExecutionPolicy policy = ExecutionPolicy::Parallel);

}  // namespace kgspec
