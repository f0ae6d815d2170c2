#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace microlocal {

/// Line-oriented `key = value` file with `[section]` headers. `#` starts a
/// comment, blank lines are ignored and keys before the first header belong
/// to the section "". Every malformed line, duplicate key, unknown key or
/// bad value raises ConfigError.
class Config {
public:
  using Schema = std::map<std::string, std::set<std::string>>;

  static Config parse(std::istream& in, const std::string& origin = "<config>");
  static Config parse_text(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  /// Rejects every section or key absent from the schema.
  void restrict_to(const Schema& schema) const;

  bool has(const std::string& section, const std::string& key) const;
  /// Overrides or adds a value, as the command line does.
  void set(const std::string& section, const std::string& key, const std::string& value);

  std::string get(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  double get_real(const std::string& section, const std::string& key) const;
  double get_real(const std::string& section, const std::string& key, double fallback) const;
  long long get_int(const std::string& section, const std::string& key) const;
  long long get_int(const std::string& section, const std::string& key, long long fallback) const;
  std::uint64_t get_seed(const std::string& section, const std::string& key,
                         std::uint64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_reals(const std::string& section, const std::string& key) const;
  std::vector<int> get_ints(const std::string& section, const std::string& key) const;
  std::vector<std::string> get_strings(const std::string& section, const std::string& key) const;
  /// Value naming an existing file.
  std::string get_path(const std::string& section, const std::string& key) const;
  std::vector<std::string> get_paths(const std::string& section, const std::string& key) const;

  /// Real value that must lie in [lo, hi].
  double get_real_in(const std::string& section, const std::string& key, double fallback,
                     double lo, double hi) const;

  const std::string& text() const { return text_; }
  const std::string& origin() const { return origin_; }

private:
  std::string origin_;
  std::string resolve_path(const std::string& section, const std::string& key, const std::string& p) const;
  std::string text_;
  std::map<std::string, std::map<std::string, std::string>> values_;
};

double parse_real(const std::string& text, const std::string& what);
long long parse_int(const std::string& text, const std::string& what);
/// Comma-separated list; surrounding spaces are trimmed.
std::vector<std::string> split_list(const std::string& text);

}  // namespace microlocal
