#include "intermit/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

namespace intermit::config {

namespace {

// Closed key schema, version 1.
const std::array<const char*, 36> kKnownKeys = {
    "schema",
    "seed",
    "map.family",
    "map.d",
    "map.alpha",
    "map.c",
    "experiment.n",
    "experiment.replicas",
    "experiment.initial_law",
    "experiment.t_grid",
    "experiment.lambda_grid",
    "experiment.d_horizon_factor",
    "experiment.threads",
    "accept.orbits",
    "accept.orbit_len",
    "accept.sampler_n",
    "accept.sde_paths",
    "accept.returns",
    "bessel.dt",
    "bessel.eps",
    "bessel.s_max",
    "tol.arcsine_ks",
    "tol.halfgauss_ks",
    "tol.beta_ks",
    "tol.dtail_alpha",
    "tol.dtail_fit_lo",
    "tol.dtail_fit_hi",
    "tol.zg_ks",
    "tol.cross_ks",
    "tol.sde_ks",
    "tol.alpha_band",
    "tol.beta_band",
    "tol.density_norm",
    "tol.ml_match",
    "tol.two_sample_p",
    "tol.laplace_match",
};

bool known(const std::string& key) {
  return std::find_if(kKnownKeys.begin(), kKnownKeys.end(),
                      [&](const char* k) { return key == k; }) != kKnownKeys.end();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void Config::set_checked(const std::string& key, const std::string& value,
                         const std::string& origin) {
  if (!known(key)) throw ConfigError(origin + ": unknown key '" + key + "'");
  kv_[key] = value;
}

Config Config::from_string(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    cfg.set_checked(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), origin);
  }
  if (cfg.get_int("schema", -1) != 1)
    throw ConfigError(origin + ": missing or unsupported schema (expected schema = 1)");
  return cfg;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str(), path);
}

Config Config::defaults() { return from_string("schema = 1\n", "<defaults>"); }

void Config::apply_override(const std::string& key_equals_value) {
  const auto eq = key_equals_value.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must be key=value: " + key_equals_value);
  set_checked(trim(key_equals_value.substr(0, eq)), trim(key_equals_value.substr(eq + 1)),
              "<override>");
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config value of '" + key + "' is not a number: " + it->second);
  }
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    return std::stoll(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config value of '" + key + "' is not an integer: " + it->second);
  }
}

std::vector<double> Config::get_list(const std::string& key, std::vector<double> fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(trim(item)));
    } catch (const std::exception&) {
      throw ConfigError("config list '" + key + "' has a bad entry: " + item);
    }
  }
  if (out.empty()) throw ConfigError("config list '" + key + "' is empty");
  return out;
}

}  // namespace intermit::config
