#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace mq {

// Flat key=value configuration ('#' starts a comment).  Every parameter of
// the laboratory is a scalar, so no nesting is supported on purpose.
class ConfigMap {
 public:
  static ConfigMap from_file(const std::string& path);
  static ConfigMap from_string(const std::string& text);

  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { kv_[key] = value; }

  // Required lookups throw std::invalid_argument naming the missing key.
  double get_real(const std::string& key) const;
  double get_real(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_str(const std::string& key, const std::string& fallback) const;
  // Comma-separated list of reals (used by d1 when dim > 1).
  std::vector<double> get_real_list(const std::string& key,
                                    const std::vector<double>& fallback) const;

  const std::map<std::string, std::string>& items() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

ModelParams model_from_config(const ConfigMap& c);
RunConfig runconfig_from_config(const ConfigMap& c);

// Grid keys: grid_points (intervals M), grid_cluster.
RadialGrid grid_from_config(const ConfigMap& c);

}  // namespace mq
