#include "microlocal/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "microlocal/error.hpp"

namespace microlocal {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
      return false;
  return true;
}

std::string where(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

}  // namespace

double parse_real(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  require(res.ec == std::errc() && res.ptr == t.data() + t.size() && std::isfinite(v) && !t.empty(),
          errors::kConfigError, what + ": '" + text + "' is not a finite number");
  return v;
}

long long parse_int(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  long long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  require(res.ec == std::errc() && res.ptr == t.data() + t.size() && !t.empty(),
          errors::kConfigError, what + ": '" + text + "' is not an integer");
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  if (!text.empty() && text.back() == ',') out.emplace_back();
  return out;
}

Config Config::parse(std::istream& in, const std::string& origin) {
  std::stringstream raw;
  raw << in.rdbuf();
  return parse_text(raw.str(), origin);
}

Config Config::parse_text(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  cfg.text_ = text;
  std::stringstream in(text);
  std::string line;
  std::string section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string at = origin + ":" + std::to_string(number) + ": ";
    if (line.front() == '[') {
      require(line.back() == ']', errors::kConfigError, at + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      require(valid_name(section), errors::kConfigError, at + "bad section name");
      cfg.values_[section];
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string::npos, errors::kConfigError, at + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    require(valid_name(key), errors::kConfigError, at + "bad key name");
    auto& sec = cfg.values_[section];
    require(!sec.count(key), errors::kConfigError, at + "duplicate key " + where(section, key));
    sec[key] = value;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), errors::kConfigError, "cannot open config file " + path);
  return parse(in, path);
}

void Config::restrict_to(const Schema& schema) const {
  for (const auto& [section, keys] : values_) {
    const auto it = schema.find(section);
    require(it != schema.end(), errors::kConfigError,
            origin_ + ": unknown section [" + section + "]");
    for (const auto& [key, value] : keys)
      require(it->second.count(key), errors::kConfigError,
              origin_ + ": unknown key " + where(section, key));
  }
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto it = values_.find(section);
  return it != values_.end() && it->second.count(key);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  values_[section][key] = value;
}

std::string Config::get(const std::string& section, const std::string& key) const {
  require(has(section, key), errors::kConfigError,
          origin_ + ": missing key " + where(section, key));
  return values_.at(section).at(key);
}

std::string Config::get(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double Config::get_real(const std::string& section, const std::string& key) const {
  return parse_real(get(section, key), where(section, key));
}

double Config::get_real(const std::string& section, const std::string& key,
                        double fallback) const {
  return has(section, key) ? get_real(section, key) : fallback;
}

long long Config::get_int(const std::string& section, const std::string& key) const {
  return parse_int(get(section, key), where(section, key));
}

long long Config::get_int(const std::string& section, const std::string& key,
                          long long fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

std::uint64_t Config::get_seed(const std::string& section, const std::string& key,
                               std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string t = trim(get(section, key));
  std::uint64_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  require(res.ec == std::errc() && res.ptr == t.data() + t.size() && !t.empty(),
          errors::kConfigError, where(section, key) + ": seed must be a 64-bit unsigned integer");
  return v;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(errors::kConfigError, where(section, key) + ": expected true or false");
}

std::vector<double> Config::get_reals(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : split_list(get(section, key))) out.push_back(parse_real(s, where(section, key)));
  return out;
}

std::vector<int> Config::get_ints(const std::string& section, const std::string& key) const {
  std::vector<int> out;
  for (const auto& s : split_list(get(section, key)))
    out.push_back(static_cast<int>(parse_int(s, where(section, key))));
  return out;
}

std::vector<std::string> Config::get_strings(const std::string& section,
                                             const std::string& key) const {
  return split_list(get(section, key));
}

std::string Config::resolve_path(const std::string& section, const std::string& key,
                                 const std::string& p) const {
  namespace fs = std::filesystem;
  fs::path path(p);
  if (path.is_relative() && !fs::exists(path)) {
    // Relative to the config file's directory.
    const fs::path alt = fs::path(origin_).parent_path() / path;
    if (fs::exists(alt)) return alt.string();
  }
  require(fs::exists(path), errors::kConfigError,
          where(section, key) + ": file '" + p + "' does not exist");
  return p;
}

std::string Config::get_path(const std::string& section, const std::string& key) const {
  return resolve_path(section, key, get(section, key));
}

std::vector<std::string> Config::get_paths(const std::string& section, const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& p : get_strings(section, key)) out.push_back(resolve_path(section, key, p));
  return out;
}

double Config::get_real_in(const std::string& section, const std::string& key, double fallback,
                           double lo, double hi) const {
  const double v = get_real(section, key, fallback);
  require(v >= lo && v <= hi, errors::kConfigError,
          where(section, key) + " must lie in [" + std::to_string(lo) + ", " +
              std::to_string(hi) + "]");
  return v;
}

}  // namespace microlocal
