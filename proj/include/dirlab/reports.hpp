#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dirlab/config.hpp"

namespace dirlab {

inline constexpr const char* kArtifactVersion = "1.0.0";

struct WrittenFile {
  std::string name;
  std::string sha256;
  std::size_t bytes = 0;
};

/// Writes the output files of one run, in call order, into a directory that
/// is created on construction. Not thread-safe; all writes come from the
/// orchestrating thread.
class ReportWriter {
 public:
  explicit ReportWriter(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  const std::vector<WrittenFile>& files() const { return files_; }

  void write_text(const std::string& name, const std::string& content);
  /// Pretty-printed with a trailing newline.
  void write_json(const std::string& name, const nlohmann::ordered_json& doc);
  void write_csv(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);
  /// Two columns x y under a comment header naming the reference curve.
  void write_plot(const std::string& name, const std::string& x_label, const std::string& y_label,
                  const std::string& reference, const std::vector<double>& x, const std::vector<double>& y);
  /// manifest.json: config echo, version, wall time and digests of every file
  /// written so far. Call last.
  void write_manifest(const ExperimentConfig& config, double wall_seconds);

 private:
  std::filesystem::path dir_;
  std::vector<WrittenFile> files_;
};

/// Field quoted when it holds a comma, quote or newline.
std::string csv_field(const std::string& s);

}  // namespace dirlab
