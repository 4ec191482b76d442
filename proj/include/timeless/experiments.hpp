#pragma once

#include "timeless/config.hpp"
#include "timeless/manifest.hpp"

#include <filesystem>

namespace timeless {

std::string_view artifact_version();

/// Runs the named experiment, writes its CSV/JSON outputs into `output_dir`
/// and always finishes with manifest.json there.  Numerical non-convergence is
/// recorded in the manifest (exit code 3); any other exception is recorded and
/// rethrown.
RunManifest run_experiment(const ExperimentConfig& config, const std::filesystem::path& output_dir);
/// Same, with the output directory from resolve_output_dir(config).
RunManifest run_experiment(const ExperimentConfig& config);

}  // namespace timeless
