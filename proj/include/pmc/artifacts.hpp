#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace pmc {

/// Writes run artifacts. Every file embeds the config hash; CSV uses ','
/// separator, '.' decimal point, LF line endings, 17 significant digits.
class ArtifactWriter {
public:
  ArtifactWriter(std::filesystem::path dir, std::string config_hash);

  /// Extra provenance recorded in every artifact (spectrum shift, fitted
  /// constants, ...).
  void note(const std::string& key, const nlohmann::json& value);

  void csv(const std::string& name, const std::vector<std::string>& columns,
           const std::vector<std::vector<double>>& rows) const;
  void json(const std::string& name, nlohmann::json payload) const;

  const std::filesystem::path& dir() const { return dir_; }
  static std::string format(double v);

private:
  std::filesystem::path dir_;
  std::string config_hash_;
  nlohmann::json notes_;
};

} // namespace pmc
