#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace timeless {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string comparison;  // "<", ">", "==", "decreasing", ...
  std::string detail;
};

struct OutputFile {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::size_t bytes = 0;
};

struct RunManifest {
  std::string experiment;
  nlohmann::json config;
  std::string version;
  double wall_seconds = 0.0;
  bool converged = true;
  std::string error;  // empty unless the run aborted
  std::vector<CheckResult> checks;
  std::vector<OutputFile> outputs;

  bool passed() const;
  /// 0 pass, 1 check failure, 3 numerical non-convergence.
  int exit_code() const;
  nlohmann::json to_json() const;
};

std::string sha256_hex(std::string_view bytes);

/// Writes via a temporary sibling and rename, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Output files of one run, hashed as they are written.
class OutputDirectory {
 public:
  explicit OutputDirectory(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  void write(const std::string& name, std::string_view contents);
  const std::vector<OutputFile>& files() const { return files_; }

 private:
  std::filesystem::path root_;
  std::vector<OutputFile> files_;
};

/// manifest.json in `dir`.
void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);

}  // namespace timeless
