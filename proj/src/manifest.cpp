#include "timeless/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <stdexcept>
#include <unistd.h>

namespace timeless {

bool RunManifest::passed() const {
  if (!error.empty() || !converged) return false;
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

int RunManifest::exit_code() const {
  if (!converged) return 3;
  return passed() ? 0 : 1;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["config"] = config;
  j["version"] = version;
  j["wall_seconds"] = wall_seconds;
  j["converged"] = converged;
  j["passed"] = passed();
  j["exit_code"] = exit_code();
  if (!error.empty()) j["error"] = error;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name},
                           {"passed", c.passed},
                           {"value", c.value},
                           {"threshold", c.threshold},
                           {"comparison", c.comparison},
                           {"detail", c.detail}});
  }
  j["outputs"] = nlohmann::json::array();
  for (const auto& o : outputs) j["outputs"].push_back({{"path", o.path}, {"sha256", o.sha256}, {"bytes", o.bytes}});
  return j;
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path temp = path;
  temp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + temp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("short write to '" + temp.string() + "'");
  }
  std::filesystem::rename(temp, path);
}

OutputDirectory::OutputDirectory(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

void OutputDirectory::write(const std::string& name, std::string_view contents) {
  write_file_atomic(root_ / name, contents);
  files_.push_back({name, sha256_hex(contents), contents.size()});
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest) {
  write_file_atomic(dir / "manifest.json", manifest.to_json().dump(2) + "\n");
}

}  // namespace timeless
