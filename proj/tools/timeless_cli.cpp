#include "timeless/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

enum ExitCode { kPass = 0, kCheckFailure = 1, kConfigError = 2, kNonConvergence = 3 };

void print_diagnostics(const std::vector<timeless::Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) std::cerr << (d.path.empty() ? "<document>" : d.path) << ": " << d.reason << '\n';
}

int list_experiments() {
  for (const auto& info : timeless::experiment_catalog()) {
    std::printf("%-20s %s\n", info.name.c_str(), info.summary.c_str());
  }
  return kPass;
}

int validate(const std::string& path) {
  const auto diagnostics = timeless::validate_config(path);
  if (diagnostics.empty()) {
    std::cout << path << ": ok\n";
    return kPass;
  }
  print_diagnostics(diagnostics);
  return kConfigError;
}

int run(const std::string& path, const std::string& output_dir) {
  timeless::ExperimentConfig config;
  try {
    config = timeless::load_config(path);
  } catch (const timeless::ConfigError& e) {
    print_diagnostics(e.diagnostics());
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "config: " << e.what() << '\n';
    return kConfigError;
  }
  if (!output_dir.empty()) config.output_dir = output_dir;
  const auto dir = timeless::resolve_output_dir(config);

  timeless::RunManifest manifest;
  try {
    manifest = timeless::run_experiment(config, dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\nmanifest: " << (dir / "manifest.json").string() << '\n';
    return kCheckFailure;
  }

  for (const auto& c : manifest.checks) {
    std::printf("[%s] %-32s value=%-12.6g %s %g", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value,
                c.comparison.c_str(), c.threshold);
    if (!c.detail.empty()) std::printf("  %s", c.detail.c_str());
    std::printf("\n");
  }
  if (!manifest.error.empty()) std::cerr << "error: " << manifest.error << '\n';
  if (!manifest.converged) std::cerr << "numerical solver did not converge\n";
  std::printf("%zu output file(s), manifest: %s\n", manifest.outputs.size(), (dir / "manifest.json").c_str());
  return manifest.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clock-conditioned measurement experiments"};
  app.require_subcommand(1);

  auto* list_cmd = app.add_subcommand("list", "List the available experiments");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a configuration file without running it");
  validate_cmd->add_option("config", validate_path, "Configuration JSON")->required();

  std::string run_path;
  std::string output_dir;
  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a configuration file");
  run_cmd->add_option("config", run_path, "Configuration JSON")->required();
  run_cmd->add_option("-o,--output-dir", output_dir,
                      std::string("Output directory; relative paths resolve against $") +
                          timeless::kOutputRootVariable);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  if (*list_cmd) return list_experiments();
  if (*validate_cmd) return validate(validate_path);
  if (*run_cmd) return run(run_path, output_dir);
  return kConfigError;
}
