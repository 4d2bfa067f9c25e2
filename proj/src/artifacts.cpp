#include "pmc/artifacts.hpp"

#include <cstdio>
#include <fstream>

#include "pmc/errors.hpp"

namespace pmc {

ArtifactWriter::ArtifactWriter(std::filesystem::path dir, std::string config_hash)
    : dir_(std::move(dir)), config_hash_(std::move(config_hash)) {
  std::filesystem::create_directories(dir_);
  notes_ = nlohmann::json::object();
}

void ArtifactWriter::note(const std::string& key, const nlohmann::json& value) {
  notes_[key] = value;
}

std::string ArtifactWriter::format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ArtifactWriter::csv(const std::string& name,
                         const std::vector<std::string>& columns,
                         const std::vector<std::vector<double>>& rows) const {
  std::ofstream out(dir_ / name, std::ios::binary);
  if (!out) throw contract_error("artifacts: cannot write " + name);
  out << "# config=" << config_hash_;
  for (const auto& [key, value] : notes_.items())
    out << " " << key << "=" << value.dump();
  out << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    out << (i ? "," : "") << columns[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format(row[i]);
    out << "\n";
  }
}

void ArtifactWriter::json(const std::string& name, nlohmann::json payload) const {
  payload["config_hash"] = config_hash_;
  payload["provenance"] = notes_;
  std::ofstream out(dir_ / name, std::ios::binary);
  if (!out) throw contract_error("artifacts: cannot write " + name);
  out << payload.dump(2) << "\n";
}

} // namespace pmc
