#include "scclab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "scclab/common.hpp"

namespace scclab {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError("key '" + key + "' expects a number, got '" + v + "'");
}

}  // namespace

Config Config::parse(std::istream& is) {
  Config c;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    c.values[key] = val;
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  return parse(f);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : to_double(key, it->second);
}

long long Config::get_int(const std::string& key, long long fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  double d = to_double(key, it->second);
  if (d != std::floor(d)) throw ConfigError("key '" + key + "' expects an integer");
  return static_cast<long long>(d);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "' expects a boolean");
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  std::string s = it->second;
  for (char& ch : s)
    if (ch == ',') ch = ' ';
  std::istringstream ss(s);
  std::vector<double> out;
  std::string tok;
  while (ss >> tok) out.push_back(to_double(key, tok));
  return out;
}

double Config::get_positive(const std::string& key, double fallback) const {
  double v = get_double(key, fallback);
  if (!(v > 0)) throw ConfigError("key '" + key + "' must be positive");
  return v;
}

std::vector<double> Config::get_radii(const std::string& key, const std::vector<double>& fallback) const {
  auto r = get_doubles(key, fallback);
  if (r.empty()) throw ConfigError("key '" + key + "' needs at least one radius");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] > 0)) throw ConfigError("key '" + key + "': radii must be positive");
    if (i > 0 && !(r[i] > r[i - 1])) throw ConfigError("key '" + key + "': radii must be increasing");
  }
  return r;
}

std::uint64_t Config::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& [k, v] : values) {
    for (char ch : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

std::string Config::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

void Config::write(std::ostream& os) const {
  for (const auto& [k, v] : values) os << k << " = " << v << '\n';
}

std::vector<double> linspace_step(double start, double stop, double step) {
  if (!(step > 0)) throw ConfigError("step must be positive");
  std::vector<double> out;
  for (int i = 0;; ++i) {
    double x = start + i * step;
    if (x > stop + 1e-9 * std::max(1.0, std::abs(stop))) break;
    out.push_back(x);
  }
  return out;
}

}  // namespace scclab
