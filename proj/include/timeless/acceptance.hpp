#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace timeless {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;         // checks_passed && within_runtime
  bool checks_passed = false;  // numerical checks only
  bool within_runtime = true;
  bool converged = true;
  double seconds = 0.0;
  double runtime_limit = 0.0;  // 0 when the criterion has no runtime bound
  std::vector<std::pair<std::string, double>> metrics;
  std::string detail;  // failed sub-checks, human readable
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
};

CriterionResult criterion_kernel_exactness(const AcceptanceOptions& options);
CriterionResult criterion_step_approach(const AcceptanceOptions& options);
CriterionResult criterion_convolution_identities(const AcceptanceOptions& options);
CriterionResult criterion_ideal_equivalence(const AcceptanceOptions& options);
CriterionResult criterion_self_consistency(const AcceptanceOptions& options);
CriterionResult criterion_nonunitarity(const AcceptanceOptions& options);
CriterionResult criterion_temporal_order(const AcceptanceOptions& options);
CriterionResult criterion_probability_structure(const AcceptanceOptions& options);
CriterionResult criterion_kuchar(const AcceptanceOptions& options);
CriterionResult criterion_discrete_unitarity(const AcceptanceOptions& options);
CriterionResult criterion_translation(const AcceptanceOptions& options);

/// Criteria 1 to 11 in order.  Determinism (12) compares whole runs and lives
/// with the experiment runner.
std::vector<CriterionResult> run_acceptance_criteria(const AcceptanceOptions& options = {});

/// One line: "[PASS] 5 Non-ideal evolution self-consistency (0.41 s) ..."
std::string format_criterion(const CriterionResult& result);

/// Columns id, title, passed, metric, value.  No timings, so reruns are byte-identical.
void write_acceptance_csv(std::ostream& out, const std::vector<CriterionResult>& results);

}  // namespace timeless
