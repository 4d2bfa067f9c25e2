#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pmc {

/// Flat INI-style configuration: `[section]` headers, `key = value` lines,
/// `#` or `;` comments. Typed getters fall back to defaults.
struct Config {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string raw;

  static Config parse_file(const std::string& path);
  static Config parse_string(std::string text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback = "") const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  int get_int(const std::string& section, const std::string& key,
              int fallback) const;
  std::optional<double> get_optional_double(const std::string& section,
                                            const std::string& key) const;
  std::vector<double> get_list(const std::string& section,
                               const std::string& key,
                               const std::vector<double>& fallback) const;

  /// FNV-1a 64-bit hash of the raw configuration text, as 16 hex digits.
  std::string hash() const;
};

} // namespace pmc
