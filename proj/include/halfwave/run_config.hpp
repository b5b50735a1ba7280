#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "halfwave/grid.hpp"

namespace halfwave {

class ConfigError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// key=value text config. Blank lines and text after '#' are ignored;
/// lists are comma separated. Getters record the effective value of every
/// key they are asked for, so echo() reproduces the run.
class RunConfig {
 public:
  static RunConfig parse(const std::string& text, const std::string& origin = "<config>");
  static RunConfig load(const std::string& path);

  /// "key=value"; a later assignment replaces an earlier one.
  void assign(const std::string& assignment);
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  double get_double(const std::string& key, double def);
  long get_long(const std::string& key, long def);
  int get_int(const std::string& key, int def);
  bool get_bool(const std::string& key, bool def);
  std::string get_string(const std::string& key, const std::string& def);
  std::vector<double> get_list(const std::string& key, const std::vector<double>& def);
  std::array<double, 2> get_pair(const std::string& key, const std::array<double, 2>& def);

  /// Keys that were set but never read.
  std::vector<std::string> unused() const;
  /// Throws ConfigError naming every unused key.
  void require_all_used() const;
  const nlohmann::json& echo() const { return echo_; }

 private:
  const std::string* lookup(const std::string& key);

  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
  nlohmann::json echo_ = nlohmann::json::object();
};

double parse_double(const std::string& s, const std::string& what);
long parse_long(const std::string& s, const std::string& what);

}  // namespace halfwave
