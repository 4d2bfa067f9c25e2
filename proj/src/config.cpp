#include "pmc/config.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include "pmc/errors.hpp"

namespace pmc {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

} // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw contract_error("config: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

Config Config::parse_string(std::string text) {
  Config config;
  config.raw = std::move(text);
  std::istringstream in(config.raw);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line.substr(0, line.find_first_of("#;")));
    if (stripped.empty()) continue;
    if (stripped.front() == '[') {
      if (stripped.back() != ']')
        throw contract_error("config: malformed section at line " +
                             std::to_string(line_no));
      section = trim(stripped.substr(1, stripped.size() - 2));
      continue;
    }
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw contract_error("config: expected key = value at line " +
                           std::to_string(line_no));
    config.sections[section][trim(stripped.substr(0, eq))] =
        trim(stripped.substr(eq + 1));
  }
  return config;
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto s = sections.find(section);
  if (s == sections.end()) return false;
  const auto k = s->second.find(key);
  return k != s->second.end() && !k->second.empty();
}

std::string Config::get(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
  const auto s = sections.find(section);
  if (s == sections.end()) return fallback;
  const auto k = s->second.find(key);
  return k == s->second.end() || k->second.empty() ? fallback : k->second;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  const std::string v = get(section, key);
  if (v.empty()) return fallback;
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    throw contract_error("config: bad number for " + section + "." + key);
  }
}

int Config::get_int(const std::string& section, const std::string& key,
                    int fallback) const {
  const std::string v = get(section, key);
  if (v.empty()) return fallback;
  try {
    return std::stoi(v);
  } catch (const std::exception&) {
    throw contract_error("config: bad integer for " + section + "." + key);
  }
}

std::optional<double> Config::get_optional_double(const std::string& section,
                                                  const std::string& key) const {
  if (!has(section, key)) return std::nullopt;
  return get_double(section, key, 0.0);
}

std::vector<double> Config::get_list(const std::string& section,
                                     const std::string& key,
                                     const std::vector<double>& fallback) const {
  const std::string v = get(section, key);
  if (v.empty()) return fallback;
  std::vector<double> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw contract_error("config: bad list entry for " + section + "." + key);
    }
  }
  if (out.empty())
    throw contract_error("config: empty list for " + section + "." + key);
  return out;
}

std::string Config::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : raw) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return std::string(out);
}

} // namespace pmc
