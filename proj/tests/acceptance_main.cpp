// One line per acceptance criterion; exit status 0 only when all pass.

#include "timeless/acceptance.hpp"
#include "timeless/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

using namespace timeless;

namespace {

std::string acceptance_hash(const RunManifest& manifest) {
  for (const auto& f : manifest.outputs) {
    if (f.path == "acceptance.csv") return f.sha256;
  }
  return {};
}

bool determinism_criterion() {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentConfig config = load_config(std::filesystem::path(CONFIG_DIR) / "acceptance_suite.json");
  const auto root = std::filesystem::temp_directory_path() / "timeless_acceptance_determinism";
  std::filesystem::remove_all(root);
  const std::string first = acceptance_hash(run_experiment(config, root / "a"));
  const std::string second = acceptance_hash(run_experiment(config, root / "b"));
  std::filesystem::remove_all(root);
  const bool ok = !first.empty() && first == second;
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char timing[32];
  std::snprintf(timing, sizeof(timing), "%.2f", seconds);
  std::cout << (ok ? "[PASS]" : "[FAIL]") << " 12 Determinism (" << timing << " s) sha256=" << first.substr(0, 16)
            << (ok ? "" : " rerun=" + second.substr(0, 16)) << '\n';
  return ok;
}

}  // namespace

int main() {
  try {
    bool all = true;
    for (const auto& r : run_acceptance_criteria()) {
      std::cout << format_criterion(r) << '\n' << std::flush;
      all = all && r.passed;
    }
    all = determinism_criterion() && all;
    return all ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << '\n';
    return 2;
  }
}
