#include "halfwave/run_config.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace halfwave {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

}  // namespace

double parse_double(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size()) {
    throw ConfigError(what + ": not a number: '" + s + "'");
  }
  return v;
}

long parse_long(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  long v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size()) {
    throw ConfigError(what + ": not an integer: '" + s + "'");
  }
  return v;
}

RunConfig RunConfig::parse(const std::string& text, const std::string& origin) {
  RunConfig c;
  std::istringstream is(text);
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.find('=') == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(n) + ": expected key=value");
    }
    c.assign(line);
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void RunConfig::assign(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key.empty()) throw ConfigError("empty key");
  values_[key] = value;
}

const std::string* RunConfig::lookup(const std::string& key) {
  used_.insert(key);
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

double RunConfig::get_double(const std::string& key, double def) {
  const std::string* s = lookup(key);
  const double v = s ? parse_double(*s, key) : def;
  echo_[key] = v;
  return v;
}

long RunConfig::get_long(const std::string& key, long def) {
  const std::string* s = lookup(key);
  const long v = s ? parse_long(*s, key) : def;
  echo_[key] = v;
  return v;
}

int RunConfig::get_int(const std::string& key, int def) {
  const long v = get_long(key, def);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(key + ": out of range");
  }
  return static_cast<int>(v);
}

bool RunConfig::get_bool(const std::string& key, bool def) {
  const std::string* s = lookup(key);
  bool v = def;
  if (s) {
    if (*s == "true" || *s == "1" || *s == "yes" || *s == "on") {
      v = true;
    } else if (*s == "false" || *s == "0" || *s == "no" || *s == "off") {
      v = false;
    } else {
      throw ConfigError(key + ": not a boolean: '" + *s + "'");
    }
  }
  echo_[key] = v;
  return v;
}

std::string RunConfig::get_string(const std::string& key, const std::string& def) {
  const std::string* s = lookup(key);
  std::string v = s ? *s : def;
  echo_[key] = v;
  return v;
}

std::vector<double> RunConfig::get_list(const std::string& key, const std::vector<double>& def) {
  const std::string* s = lookup(key);
  std::vector<double> v = def;
  if (s) {
    v.clear();
    for (const auto& item : split(*s, ',')) v.push_back(parse_double(item, key));
  }
  echo_[key] = v;
  return v;
}

std::array<double, 2> RunConfig::get_pair(const std::string& key,
                                          const std::array<double, 2>& def) {
  const std::string* s = lookup(key);
  std::array<double, 2> v = def;
  if (s) {
    const auto items = split(*s, ',');
    if (items.size() != 2) throw ConfigError(key + ": expected two comma separated values");
    v = {parse_double(items[0], key), parse_double(items[1], key)};
  }
  echo_[key] = v;
  return v;
}

std::vector<std::string> RunConfig::unused() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) {
    if (!used_.count(k)) out.push_back(k);
  }
  return out;
}

void RunConfig::require_all_used() const {
  const auto u = unused();
  if (u.empty()) return;
  std::string msg = "unknown config key";
  msg += u.size() > 1 ? "s:" : ":";
  for (const auto& k : u) msg += " " + k;
  throw ConfigError(msg);
}

}  // namespace halfwave
