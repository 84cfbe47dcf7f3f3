#include "kgspec/config.hpp"

#include <fstream>
#include <sstream>

namespace kgspec {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = line;
    bool quoted = false;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (body[i] == '"') quoted = !quoted;
      if (body[i] == '#' && !quoted) {
        body.resize(i);
        break;
      }
    }
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw DomainError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw DomainError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    c.values_[key] = value;
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::string Config::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw DomainError(origin_ + ": missing key '" + key + "'");
  return it->second;
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::num(const std::string& key) const {
  const std::string s = str(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (trim(s.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw DomainError(origin_ + ": key '" + key + "' is not a number: " + s);
}

double Config::num(const std::string& key, double fallback) const {
  return has(key) ? num(key) : fallback;
}

long Config::integer(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const double v = num(key);
  if (v != static_cast<double>(static_cast<long>(v))) {
    throw DomainError(origin_ + ": key '" + key + "' must be an integer");
  }
  return static_cast<long>(v);
}

bool Config::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = str(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw DomainError(origin_ + ": key '" + key + "' is not a boolean: " + v);
}

std::vector<double> Config::list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(str(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

std::string Config::dump() const {
  std::string s;
  for (const auto& [k, v] : values_) s += k + " = " + v + "\n";
  return s;
}

CoefficientProfile profile_from_config(const Config& c) {
  const std::string speed = c.str("speed", c.str("family", "constant"));
  SpeedLaw s;
  if (speed == "constant") s = speed_constant();
  else if (speed == "polynomial") s = speed_polynomial(c.num("ell"));
  else if (speed == "exponential") s = speed_exponential();
  else if (speed == "scale_invariant") s = speed_scale_invariant(c.num("alpha"), c.num("A0", 1.0));
  else if (speed == "oscillating") s = speed_oscillating();
  else if (speed == "expression") s = speed_expression(c.str("speed_expr"));
  else throw DomainError("unknown speed family '" + speed + "'");

  const std::string mass = c.str("mass", "zero");
  MassLaw m;
  if (mass == "zero") m = mass_zero();
  else if (mass == "constant") m = mass_constant(c.num("mu0"));
  else if (mass == "power") m = mass_power(c.num("mu0", 1.0), c.num("mass_exp"));
  else if (mass == "scale_invariant") m = mass_scale_invariant(c.num("mu"));
  else if (mass == "log") m = mass_log(c.num("mu0"), c.num("gamma"));
  else if (mass == "oscillating_mu") m = mass_oscillating_mu();
  else if (mass == "expression") m = mass_expression(c.str("mass_expr"));
  else throw DomainError("unknown mass family '" + mass + "'");

  return CoefficientProfile(std::move(s), std::move(m), c.str("label", ""));
}

}  // namespace kgspec
