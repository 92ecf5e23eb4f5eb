#include "io/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mq {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw std::invalid_argument("config key '" + key + "': bad number '" + v + "'");
  return x;
}

}  // namespace

ConfigMap ConfigMap::from_string(const std::string& text) {
  ConfigMap c;
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
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key");
    c.kv_[key] = val;
  }
  return c;
}

ConfigMap ConfigMap::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return from_string(ss.str());
}

double ConfigMap::get_real(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end())
    throw std::invalid_argument("missing config key '" + key + "'");
  return parse_real(key, it->second);
}

double ConfigMap::get_real(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : parse_real(key, it->second);
}

long ConfigMap::get_int(const std::string& key) const {
  return static_cast<long>(get_real(key));
}

long ConfigMap::get_int(const std::string& key, long fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : static_cast<long>(parse_real(key, it->second));
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config key '" + key + "': bad boolean '" + v + "'");
}

std::string ConfigMap::get_str(const std::string& key,
                               const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

std::vector<double> ConfigMap::get_real_list(
    const std::string& key, const std::vector<double>& fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::vector<double> out;
  std::istringstream ss(it->second);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(parse_real(key, trim(tok)));
  if (out.empty())
    throw std::invalid_argument("config key '" + key + "': empty list");
  return out;
}

ModelParams model_from_config(const ConfigMap& c) {
  ModelParams mp;
  mp.lambda = c.get_real("lambda");
  mp.gamma = c.get_real("gamma");
  mp.p_exp = c.get_real("p_exp", 2.0);
  mp.q_exp = c.get_real("q_exp", 2.0);
  mp.dim = static_cast<int>(c.get_int("dim", 1));
  mp.radius = c.get_real("radius");
  mp.validate();
  return mp;
}

RunConfig runconfig_from_config(const ConfigMap& c) {
  RunConfig rc;
  rc.cfl_safety = c.get_real("cfl_safety", rc.cfl_safety);
  rc.source_safety = c.get_real("source_safety", rc.source_safety);
  rc.quench_stop = c.get_real("quench_stop", rc.quench_stop);
  rc.max_steps = c.get_int("max_steps", rc.max_steps);
  rc.output_cadence = c.get_int("output_cadence", rc.output_cadence);
  rc.diffusion_enabled = c.get_bool("diffusion_enabled", rc.diffusion_enabled);
  rc.seed = static_cast<std::uint64_t>(c.get_int("seed", 1));
  rc.workers = static_cast<int>(c.get_int("workers", 0));
  rc.validate();
  return rc;
}

RadialGrid grid_from_config(const ConfigMap& c) {
  const int M = static_cast<int>(c.get_int("grid_points"));
  const double R = c.get_real("radius");
  const double cluster = c.get_real("grid_cluster", 1.0);
  return make_graded_grid(M, R, cluster);
}

}  // namespace mq
