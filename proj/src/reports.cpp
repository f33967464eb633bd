#include "dirlab/reports.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "dirlab/digest.hpp"
#include "dirlab/errors.hpp"

namespace dirlab {

ReportWriter::ReportWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir_.string() + ": " + ec.message());
}

void ReportWriter::write_text(const std::string& name, const std::string& content) {
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + ": " + std::strerror(errno));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw std::runtime_error("write failed for " + path.string());
  files_.push_back({name, sha256_hex(content), content.size()});
}

void ReportWriter::write_json(const std::string& name, const nlohmann::ordered_json& doc) {
  write_text(name, doc.dump(2) + "\n");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void ReportWriter::write_csv(const std::string& name, const std::vector<std::string>& header,
                             const std::vector<std::vector<std::string>>& rows) {
  std::string body;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) body += ',';
      body += csv_field(cells[i]);
    }
    body += '\n';
  };
  line(header);
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw std::logic_error("csv row width mismatch in " + name);
    line(r);
  }
  write_text(name, body);
}

void ReportWriter::write_plot(const std::string& name, const std::string& x_label, const std::string& y_label,
                              const std::string& reference, const std::vector<double>& x,
                              const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::logic_error("plot column length mismatch in " + name);
  std::string body = "# " + x_label + " " + y_label + "\n# reference: " + reference + "\n";
  for (std::size_t i = 0; i < x.size(); ++i) body += format_double(x[i]) + " " + format_double(y[i]) + "\n";
  write_text(name, body);
}

void ReportWriter::write_manifest(const ExperimentConfig& config, double wall_seconds) {
  nlohmann::ordered_json doc;
  doc["artifact_version"] = kArtifactVersion;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config.entries()) cfg[k] = v;
  doc["config"] = cfg;
  doc["wall_seconds"] = wall_seconds;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& f : files_) files.push_back({{"name", f.name}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  doc["files"] = files;
  const auto path = dir_ / "manifest.json";
  const std::string text = doc.dump(2) + "\n";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + ": " + std::strerror(errno));
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace dirlab
