#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vswap/model.hpp"
#include "vswap/montecarlo.hpp"
#include "vswap/pricer.hpp"

// Flat, typed key/value run configuration. Every model parameter maps to
// exactly one key and has no default; numerical settings default as
// documented in the README. Unknown keys are rejected.

namespace vswap::config {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
  ConfigError(const std::string& msg, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg) {}
};

struct RunConfig {
  model::ModelParams params;
  model::MarketState market;
  model::SwapSpec swap;
  pricer::PricingConfig pricing;
  montecarlo::McConfig mc;
  std::string output_format = "csv";  // csv | json
  std::vector<model::Violation> violations;  // from model::validate

  bool has_hard_violations() const {
    for (const auto& v : violations)
      if (!v.feller) return true;
    return false;
  }
};

namespace detail {

struct Entry {
  std::string value;
  int line = 0;
  mutable bool used = false;
};

using KeyMap = std::map<std::string, Entry>;

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline KeyMap tokenize(const std::string& text) {
  KeyMap map;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value', got '" + line + "'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    if (value.empty()) throw ConfigError("empty value for '" + key + "'", line_no);
    if (map.count(key))
      throw ConfigError("duplicate key '" + key + "'", line_no);
    map[key] = Entry{value, line_no, false};
  }
  return map;
}

inline const Entry* find(const KeyMap& map, const std::string& key) {
  const auto it = map.find(key);
  if (it == map.end()) return nullptr;
  it->second.used = true;
  return &it->second;
}

inline const Entry& require(const KeyMap& map, const std::string& key) {
  const Entry* e = find(map, key);
  if (!e)
    throw ConfigError("missing required key '" + key +
                      "' (model parameters have no defaults)");
  return *e;
}

inline double parse_double(const Entry& e, const std::string& key) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(e.value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + e.value + "' is not a number",
                      e.line);
  }
  if (trim(e.value.substr(pos)) != "")
    throw ConfigError("key '" + key + "': trailing text after number", e.line);
  return v;
}

inline long parse_int(const Entry& e, const std::string& key) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(e.value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + e.value + "' is not an integer",
                      e.line);
  }
  if (trim(e.value.substr(pos)) != "")
    throw ConfigError("key '" + key + "': trailing text after integer", e.line);
  return v;
}

inline std::uint64_t parse_u64(const Entry& e, const std::string& key) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(e.value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + e.value + "' is not an unsigned integer",
                      e.line);
  }
  if (trim(e.value.substr(pos)) != "")
    throw ConfigError("key '" + key + "': trailing text", e.line);
  return v;
}

inline bool parse_bool(const Entry& e, const std::string& key) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  throw ConfigError("key '" + key + "': expected true or false", e.line);
}

inline std::vector<double> parse_list(const Entry& e, const std::string& key) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(e.value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw ConfigError("key '" + key + "': empty list element", e.line);
    std::size_t pos = 0;
    try {
      out.push_back(std::stod(item, &pos));
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': '" + item + "' is not a number",
                        e.line);
    }
    if (trim(item.substr(pos)) != "")
      throw ConfigError("key '" + key + "': trailing text in list element",
                        e.line);
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list", e.line);
  return out;
}

}  // namespace detail

/// Parses the documented key/value schema. Throws ConfigError with line/key
/// diagnostics on malformed input; invariant violations are collected into
/// RunConfig::violations for the caller to act on.
inline RunConfig parse_config(const std::string& text) {
  using namespace detail;
  const KeyMap map = tokenize(text);
  RunConfig cfg;

  // model parameters: all required
  cfg.params.kappa = parse_double(require(map, "kappa"), "kappa");
  cfg.params.sigma = parse_double(require(map, "sigma"), "sigma");
  cfg.params.rho = parse_double(require(map, "rho"), "rho");
  cfg.params.alpha = parse_double(require(map, "alpha"), "alpha");
  cfg.params.eta = parse_double(require(map, "eta"), "eta");

  const auto theta = parse_list(require(map, "theta_star"), "theta_star");
  const auto beta = parse_list(require(map, "beta_star"), "beta_star");
  cfg.params.theta_star.values =
      Eigen::Map<const model::Vec>(theta.data(), static_cast<long>(theta.size()));
  cfg.params.beta_star.values =
      Eigen::Map<const model::Vec>(beta.data(), static_cast<long>(beta.size()));

  const auto& gen_entry = require(map, "generator");
  const auto gen_values = parse_list(gen_entry, "generator");
  const std::size_t n = theta.size();
  if (gen_values.size() != n * n)
    throw ConfigError(
        "key 'generator': expected " + std::to_string(n * n) +
            " row-major entries for " + std::to_string(n) +
            " regimes (dimension mismatch with theta_star)",
        gen_entry.line);
  model::Mat rates(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      rates(static_cast<long>(i), static_cast<long>(j)) = gen_values[i * n + j];
  model::Convention convention = model::Convention::RowSumsZero;
  if (const Entry* e = find(map, "generator_convention")) {
    try {
      convention = model::convention_from_string(e->value);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(std::string("key 'generator_convention': ") + ex.what(),
                        e->line);
    }
  }
  cfg.params.generator = model::Generator(rates, convention);

  cfg.market.s0 = parse_double(require(map, "s0"), "s0");
  cfg.market.v0 = parse_double(require(map, "v0"), "v0");
  cfg.market.r0 = parse_double(require(map, "r0"), "r0");
  cfg.market.x0 = static_cast<int>(parse_int(require(map, "x0"), "x0"));

  cfg.swap.maturity = parse_double(require(map, "maturity"), "maturity");
  cfg.swap.observations =
      static_cast<int>(parse_int(require(map, "observations"), "observations"));
  if (const Entry* e = find(map, "notional"))
    cfg.swap.notional = parse_double(*e, "notional");

  // numerical settings: defaulted
  if (const Entry* e = find(map, "steps_per_year"))
    cfg.pricing.ode.steps_per_year = static_cast<int>(parse_int(*e, "steps_per_year"));
  if (const Entry* e = find(map, "forward_measure_horizon")) {
    try {
      cfg.pricing.horizon_mode = pricer::horizon_mode_from_string(e->value);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(std::string("key 'forward_measure_horizon': ") + ex.what(),
                        e->line);
    }
  }
  if (const Entry* e = find(map, "variance_points")) {
    cfg.pricing.variance_points = parse_bool(*e, "variance_points");
    cfg.mc.variance_points = cfg.pricing.variance_points;
  }
  if (const Entry* e = find(map, "mc_paths"))
    cfg.mc.paths = parse_int(*e, "mc_paths");
  if (const Entry* e = find(map, "mc_substeps"))
    cfg.mc.steps_per_interval = static_cast<int>(parse_int(*e, "mc_substeps"));
  if (const Entry* e = find(map, "seed")) cfg.mc.seed = parse_u64(*e, "seed");
  if (const Entry* e = find(map, "output_format")) {
    if (e->value != "csv" && e->value != "json")
      throw ConfigError("key 'output_format': expected csv or json", e->line);
    cfg.output_format = e->value;
  }

  // reject anything we did not consume
  for (const auto& [key, entry] : map)
    if (!entry.used)
      throw ConfigError("unknown key '" + key + "'", entry.line);

  cfg.violations = model::validate(cfg.params, cfg.market, cfg.swap);
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace vswap::config
