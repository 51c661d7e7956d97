#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace scclab {

// Flat key = value text. '#' starts a comment, blank lines are skipped,
// lists are comma or whitespace separated. Later keys override earlier ones.
class Config {
 public:
  std::map<std::string, std::string> values;

  static Config parse(std::istream& is);
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values[key] = value; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  // Positive real; throws ConfigError otherwise.
  double get_positive(const std::string& key, double fallback) const;
  // Strictly increasing list; throws ConfigError otherwise.
  std::vector<double> get_radii(const std::string& key, const std::vector<double>& fallback) const;

  // FNV-1a over the sorted key = value lines, so key order does not matter.
  std::uint64_t hash() const;
  std::string hash_hex() const;
  void write(std::ostream& os) const;
};

// start, start + step, ..., up to stop inclusive
std::vector<double> linspace_step(double start, double stop, double step);

}  // namespace scclab
