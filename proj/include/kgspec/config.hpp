#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kgspec/coeffs.hpp"

namespace kgspec {

/// Flat key = value configuration. Lines starting with '#' are comments;
/// values may be double-quoted. Later assignments override earlier ones.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string str(const std::string& key) const;
  std::string str(const std::string& key, const std::string& fallback) const;
  double num(const std::string& key) const;
  double num(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  /// Comma separated list of numbers.
  std::vector<double> list(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  /// Canonical text form: sorted keys, one per line.
  std::string dump() const;

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

/// Builds a profile from `speed` (alias `family`) and `mass` keys plus their
/// parameters: ell, alpha, A0, speed_expr; mu0, mass_exp, mu, gamma, mass_expr.
CoefficientProfile profile_from_config(const Config& c);

}  // namespace kgspec
