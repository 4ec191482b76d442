#include "timeless/experiments.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace timeless;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

ExperimentConfig sample(const std::string& file) {
  return load_config(std::filesystem::path(CONFIG_DIR) / file);
}

Json manifest_of(const std::filesystem::path& dir) { return Json::parse(slurp(dir / "manifest.json")); }

}  // namespace

TEST(Experiments, KernelTablesWritten) {
  Json doc = sample("kernel_fig1.json").source;
  doc["grid"] = {{"t_min", -2}, {"t_max", 2}, {"n", 41}};
  const auto dir = fresh_dir("timeless_kernel");
  const RunManifest m = run_experiment(parse_config(doc), dir);
  EXPECT_EQ(m.exit_code(), 0);
  for (const char* name : {"kernel_E1.csv", "kernel_E5.csv", "kernel_E25.csv", "step_deviation.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / name)) << name;
  }
  std::istringstream table(slurp(dir / "kernel_E5.csv"));
  std::string line;
  std::getline(table, line);
  EXPECT_EQ(line, "t,f,F,E");
  int rows = 0;
  while (std::getline(table, line)) {
    ++rows;
    if (rows == 21) EXPECT_EQ(line.substr(0, line.find(',')), "0");
  }
  EXPECT_EQ(rows, 41);
  const Json j = manifest_of(dir);
  EXPECT_EQ(j["outputs"].size(), 4u);
  EXPECT_EQ(j["exit_code"], 0);
  std::filesystem::remove_all(dir);
}

TEST(Experiments, IdealEquivalencePasses) {
  const auto dir = fresh_dir("timeless_equiv");
  const RunManifest m = run_experiment(sample("ideal_equivalence.json"), dir);
  EXPECT_EQ(m.exit_code(), 0);
  for (const auto& c : m.checks) {
    EXPECT_TRUE(c.passed) << c.name;
    if (c.name == "max_abs_dP") EXPECT_LT(c.value, 1e-6);
  }
  std::filesystem::remove_all(dir);
}

TEST(Experiments, AcausalScanDecreases) {
  const auto dir = fresh_dir("timeless_acausal");
  const RunManifest m = run_experiment(sample("acausal_scan.json"), dir);
  EXPECT_EQ(m.exit_code(), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "acausal_scan.csv"));
  std::filesystem::remove_all(dir);
}

TEST(Experiments, DeterministicOutputs) {
  const ExperimentConfig config = sample("discrete_unitarity.json");
  const auto a = fresh_dir("timeless_det_a");
  const auto b = fresh_dir("timeless_det_b");
  const RunManifest ma = run_experiment(config, a);
  const RunManifest mb = run_experiment(config, b);
  ASSERT_EQ(ma.outputs.size(), mb.outputs.size());
  for (std::size_t i = 0; i < ma.outputs.size(); ++i) {
    EXPECT_EQ(ma.outputs[i].path, mb.outputs[i].path);
    EXPECT_EQ(ma.outputs[i].sha256, mb.outputs[i].sha256) << ma.outputs[i].path;
  }
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST(Experiments, SeedChangesRandomOutputs) {
  Json doc = sample("discrete_unitarity.json").source;
  const auto a = fresh_dir("timeless_seed_a");
  const auto b = fresh_dir("timeless_seed_b");
  doc["seed"] = 1;
  const RunManifest ma = run_experiment(parse_config(doc), a);
  doc["seed"] = 2;
  const RunManifest mb = run_experiment(parse_config(doc), b);
  EXPECT_NE(ma.outputs.front().sha256, mb.outputs.front().sha256);
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST(Experiments, OutputRootVariable) {
  Json doc = sample("acausal_scan.json").source;
  doc["output_dir"] = "scan";
  const auto root = fresh_dir("timeless_root");
  ::setenv(kOutputRootVariable, root.c_str(), 1);
  run_experiment(parse_config(doc));
  ::unsetenv(kOutputRootVariable);
  EXPECT_TRUE(std::filesystem::exists(root / "scan" / "manifest.json"));
  EXPECT_TRUE(std::filesystem::exists(root / "scan" / "acausal_scan.csv"));
  std::filesystem::remove_all(root);
}

TEST(Experiments, NonConvergenceGivesExitThree) {
  Json doc = sample("nonunitarity_scan.json").source;
  doc["parameters"]["energies"] = {5};
  doc["parameters"]["max_order"] = 2;
  const auto dir = fresh_dir("timeless_nonconv");
  const RunManifest m = run_experiment(parse_config(doc), dir);
  EXPECT_FALSE(m.converged);
  EXPECT_EQ(m.exit_code(), 3);
  EXPECT_EQ(manifest_of(dir)["exit_code"], 3);
  std::filesystem::remove_all(dir);
}

TEST(Experiments, ManifestWrittenWhenRunThrows) {
  Json doc = sample("kernel_fig1.json").source;
  doc["grid"] = {{"t_min", -2}, {"t_max", 2}, {"n", 41}};
  ExperimentConfig config = parse_config(doc);
  config.parameters["energies"] = {1.0, -5.0};
  const auto dir = fresh_dir("timeless_throw");
  EXPECT_ANY_THROW(run_experiment(config, dir));
  ASSERT_TRUE(std::filesystem::exists(dir / "manifest.json"));
  const Json j = manifest_of(dir);
  EXPECT_FALSE(j["error"].get<std::string>().empty());
  EXPECT_EQ(j["passed"], false);
  std::filesystem::remove_all(dir);
}

TEST(Experiments, VersionStamped) { EXPECT_FALSE(artifact_version().empty()); }
