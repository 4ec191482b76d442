#include "timeless/acceptance.hpp"

#include "timeless/csv.hpp"
#include "timeless/discrete_time.hpp"
#include "timeless/pm_engine.hpp"
#include "timeless/temporal_order.hpp"
#include "timeless/to_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace timeless {

namespace {

constexpr double kPi = std::numbers::pi;

class Recorder {
 public:
  Recorder(int id, std::string title, double runtime_limit) : start_(std::chrono::steady_clock::now()) {
    result_.id = id;
    result_.title = std::move(title);
    result_.runtime_limit = runtime_limit;
    result_.checks_passed = true;
  }

  void metric(const std::string& name, double value) { result_.metrics.emplace_back(name, value); }

  void check(bool ok, const std::string& what) {
    if (ok) return;
    result_.checks_passed = false;
    if (!result_.detail.empty()) result_.detail += "; ";
    result_.detail += what;
  }

  void non_converged(const std::string& what) {
    result_.converged = false;
    check(false, what);
  }

  CriterionResult finish() {
    result_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (result_.runtime_limit > 0.0 && result_.seconds >= result_.runtime_limit) {
      result_.within_runtime = false;
      if (!result_.detail.empty()) result_.detail += "; ";
      result_.detail += "runtime over " + csv::num(result_.runtime_limit) + " s";
    }
    result_.passed = result_.checks_passed && result_.within_runtime;
    return result_;
  }

 private:
  CriterionResult result_;
  std::chrono::steady_clock::time_point start_;
};

COperator pauli_x() {
  COperator m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

COperator pauli_z() {
  COperator m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

COperator hadamard() {
  COperator m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

COperator projector(const CVector& v) { return v * v.adjoint(); }

// (1 / 2 pi) int_{-E}^{E} cos(e t) de by composite Simpson.
double overlap_quadrature(double energy, double t) {
  constexpr int intervals = 4000;
  const double h = 2.0 * energy / intervals;
  double sum = 0.0;
  for (int k = 0; k <= intervals; ++k) {
    const double e = -energy + h * k;
    const double w = (k == 0 || k == intervals) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    sum += w * std::cos(e * t);
  }
  return sum * h / 3.0 / (2.0 * kPi);
}

struct KickScenario {
  Trajectory trajectory;
  BornSeriesReport report;
};

KickScenario sigma_x_kick() {
  InteractionSchedule schedule(2, {});
  schedule.add_term(WindowFunction::indicator(0.0, 1.0), 0.0, 0.5 * pauli_x());
  const double energy = 5.0;
  const TimeGrid grid = trajectory_grid(schedule, energy, 0.01 / energy);
  auto [trajectory, report] =
      born_series_solve(StepKernel::bandlimited(energy), schedule, basis_vector(2, 0), grid);
  return {std::move(trajectory), std::move(report)};
}

// Weak partial copy: |1><1| (x) (1 - sigma_x) / 2 over a unit window.
InteractionSchedule partial_copy_schedule(double strength) {
  InteractionSchedule schedule(2, {2});
  const COperator coupling = strength * kron(projector(basis_vector(2, 1)), identity(2) - pauli_x());
  schedule.add_term(WindowFunction::indicator(0.0, 1.0), 0.0, coupling);
  return schedule;
}

CVector plus_state() { return (basis_vector(2, 0) + basis_vector(2, 1)) / std::sqrt(2.0); }

}  // namespace

CriterionResult criterion_kernel_exactness(const AcceptanceOptions& options) {
  Recorder rec(1, "Kernel exactness", 1.0);
  const double f = overlap_kernel_f(1.0, kPi / 2.0);
  const double oracle = overlap_quadrature(1.0, kPi / 2.0);
  const double closed = 2.0 / (kPi * kPi);
  rec.metric("f_minus_quadrature", std::abs(f - oracle));
  rec.metric("f_minus_closed_form", std::abs(f - closed));
  rec.check(std::abs(f - oracle) < 1e-10, "f(pi/2) differs from quadrature");
  rec.check(std::abs(f - closed) < 1e-10, "f(pi/2) differs from 2/pi^2");

  const double f0 = cumulative_kernel_F(1.0, 0.0);
  rec.metric("F0_minus_half", std::abs(f0 - 0.5));
  rec.check(std::abs(f0 - 0.5) < 1e-8, "F(0) != 1/2");

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double t = dist(rng);
    worst = std::max(worst, std::abs(cumulative_kernel_F(1.0, t) + cumulative_kernel_F(1.0, -t) - 1.0));
  }
  rec.metric("symmetry_defect", worst);
  rec.check(worst < 1e-8, "F(-t) + F(t) != 1");
  return rec.finish();
}

CriterionResult criterion_step_approach(const AcceptanceOptions&) {
  Recorder rec(2, "Step approach with E", 1.0);
  std::vector<double> deviations;
  for (double energy : {1.0, 5.0, 25.0}) {
    deviations.push_back(max_step_deviation(energy, 1.0, 200.0, 2000));
    rec.metric("max_dev_E" + csv::num(energy), deviations.back());
  }
  rec.check(deviations[1] < deviations[0] && deviations[2] < deviations[1], "deviation not strictly decreasing");
  rec.check(deviations[2] < 0.01, "E=25 deviation not below 0.01");
  return rec.finish();
}

CriterionResult criterion_convolution_identities(const AcceptanceOptions&) {
  Recorder rec(3, "Convolution identities", 10.0);
  const double energy = 2.0;
  ConvolutionOptions conv;
  conv.points = 4000;
  double worst_ff = 0.0;
  double worst_fF = 0.0;
  for (double t : {-1.0, 0.0, 0.5, 3.0}) {
    worst_ff = std::max(worst_ff, std::abs(convolve_f_f(energy, t, conv) - overlap_kernel_f(energy, t)));
    worst_fF = std::max(worst_fF, std::abs(convolve_f_F(energy, t, conv) - cumulative_kernel_F(energy, t)));
  }
  rec.metric("f_conv_f_defect", worst_ff);
  rec.metric("f_conv_F_defect", worst_fF);
  rec.check(worst_ff < 1e-5, "f*f != f");
  rec.check(worst_fF < 1e-5, "f*F != F");
  return rec.finish();
}

CriterionResult criterion_ideal_equivalence(const AcceptanceOptions&) {
  Recorder rec(4, "Ideal-clock equivalence", 30.0);
  const double energy = 2.0;
  const double tau1 = 0.0;
  const double tau2 = kPi / energy;
  const COperator h_s = COperator::Zero(2, 2);
  const CVector psi0 = basis_vector(2, 0);

  const COperator v1 = purification_unitary(KrausSet::projective(hadamard()));
  const COperator v2 = purification_unitary(KrausSet::computational_basis(2));
  const std::vector<Eigen::Index> ancillas{2, 2};
  const CVector ready = kron(kron(psi0, basis_vector(2, 0)), basis_vector(2, 0));
  const TimeGrid grid(-1.0, 4.0, 501);
  const Trajectory pm =
      pm_ideal_history(h_s, ancillas, {{tau1, v1, 0}, {tau2, v2, 1}}, ready, grid);
  const double t_read = 3.0;
  const double pm_single = pm_probability(pm, 0, 0, t_read).probability;
  const double pm_joint = pm_probability(pm, {{0, 0}, {1, 0}}, t_read).probability;

  const ConstraintSpace space(ClockModel::periodic(energy, 32), h_s);
  const COperator pi_plus = projector(hadamard().col(0));
  const COperator pi_zero = projector(basis_vector(2, 0));
  const auto single = two_time_probability_TO(space, psi0, pi_plus, tau1, identity(2), tau2);
  const auto joint = two_time_probability_TO(space, psi0, pi_plus, tau1, pi_zero, tau2);

  const double born_single = 0.5;
  const double born_joint = 0.25;
  rec.metric("P_PM_plus", pm_single);
  rec.metric("P_TO_plus", single.p_to);
  rec.metric("P_PM_joint", pm_joint);
  rec.metric("P_TO_joint", joint.p_to);
  const double worst = std::max({std::abs(pm_single - single.p_to), std::abs(pm_single - born_single),
                                 std::abs(single.p_to - born_single), std::abs(pm_joint - joint.p_to),
                                 std::abs(pm_joint - born_joint), std::abs(joint.p_to - born_joint),
                                 std::abs(single.p_born - born_single), std::abs(joint.p_born - born_joint)});
  rec.metric("max_pairwise_dP", worst);
  rec.check(worst < 1e-4, "PM, TO and Born disagree");
  return rec.finish();
}

CriterionResult criterion_self_consistency(const AcceptanceOptions&) {
  Recorder rec(5, "Non-ideal evolution self-consistency", 60.0);
  const KickScenario s = sigma_x_kick();
  const double roundtrip = history_roundtrip_check(s.trajectory);
  rec.metric("orders_used", s.report.orders_used);
  rec.metric("evolution_residual", s.report.residual);
  rec.metric("history_roundtrip", roundtrip);
  if (!s.report.converged) rec.non_converged("Born series did not converge");
  rec.check(s.report.orders_used <= 12, "more than 12 orders");
  rec.check(s.report.residual < 1e-5, "evolution residual too large");
  rec.check(roundtrip < 1e-4, "history roundtrip too large");
  return rec.finish();
}

CriterionResult criterion_nonunitarity(const AcceptanceOptions&) {
  Recorder rec(6, "Nonunitarity of the kick", 0.0);
  const COperator sx = pauli_x();
  DeltaKickValidation validation;
  const COperator half = delta_kick_closed_form(sx, 0.5, &validation);
  const COperator series = delta_kick_series(sx, 0.5, 50);
  const Eigen::VectorXd sv = Eigen::JacobiSVD<COperator>(half).singularValues();
  const Eigen::VectorXd sv_series = Eigen::JacobiSVD<COperator>(series).singularValues();
  const double expected = 2.0 / std::sqrt(5.0);
  double sv_defect = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    sv_defect = std::max({sv_defect, std::abs(sv(i) - sv_series(i)), std::abs(sv(i) - expected)});
  }
  rec.metric("singular_value_defect", sv_defect);
  rec.check(sv_defect < 1e-8, "singular values differ from 2/sqrt(5)");

  const COperator full = delta_kick_closed_form(sx, 1.0);
  const double unitarity = max_abs(full.adjoint() * full - identity(2));
  rec.metric("F1_unitarity_defect", unitarity);
  rec.check(unitarity < 1e-10, "closed form at F=1 not unitary");

  const KickScenario s = sigma_x_kick();
  const double norm_dev = s.trajectory.max_norm_deviation();
  rec.metric("trajectory_norm_deviation", norm_dev);
  rec.check(norm_dev > 1e-3, "finite-E trajectory looks unitary");
  return rec.finish();
}

CriterionResult criterion_temporal_order(const AcceptanceOptions&) {
  Recorder rec(7, "Indefinite temporal order", 120.0);
  const WindowFunction window = WindowFunction::indicator(0.0, 1.0);
  const double tau1 = 0.0, tau2 = 3.0, t = 10.0;

  const auto ideal = second_order_coefficients(StepKernel::ideal(), window, tau1, tau2, t);
  rec.metric("acausal_ideal", ideal.acausal);
  rec.check(ideal.acausal == 0.0, "ideal acausal coefficient not exactly zero");

  std::vector<double> magnitudes;
  double causal20 = 0.0;
  for (double energy : {2.0, 5.0, 10.0, 20.0}) {
    const auto c = second_order_coefficients(StepKernel::bandlimited(energy), window, tau1, tau2, t);
    rec.metric("acausal_E" + csv::num(energy), c.acausal);
    rec.metric("causal_E" + csv::num(energy), c.causal);
    magnitudes.push_back(std::abs(c.acausal));
    if (energy == 20.0) causal20 = c.causal;
  }
  rec.check(magnitudes[1] > 1e-3, "|acausal(E=5)| not above 1e-3");
  rec.check(std::is_sorted(magnitudes.begin(), magnitudes.end(), std::greater_equal<>()) &&
                std::adjacent_find(magnitudes.begin(), magnitudes.end()) == magnitudes.end(),
            "|acausal| not strictly decreasing");
  rec.check(std::abs(causal20 - 1.0) < 0.05, "causal(E=20) not within 0.05 of 1");
  return rec.finish();
}

CriterionResult criterion_probability_structure(const AcceptanceOptions&) {
  Recorder rec(8, "PM probability structure", 0.0);
  const double energy = 5.0;
  const InteractionSchedule schedule = partial_copy_schedule(0.5);
  const CVector ready = schedule.ready_state(plus_state());
  const TimeGrid grid = trajectory_grid(schedule, energy, 0.01 / energy);

  const auto [finite, report] = born_series_solve(StepKernel::bandlimited(energy), schedule, ready, grid);
  if (!report.converged) rec.non_converged("Born series did not converge");
  double sum_defect = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const CVector& psi = finite.states[i];
    const double denominator = psi.squaredNorm();
    double sum = 0.0;
    for (Eigen::Index a = 0; a < 2; ++a) {
      const CVector reduced = contract_factor(psi, finite.factor_dims, 1, basis_vector(2, a));
      sum += reduced.squaredNorm() / denominator;
    }
    sum_defect = std::max(sum_defect, std::abs(sum - 1.0));
  }
  const auto den = denominator_curve(finite);
  const auto [lo, hi] = std::minmax_element(den.begin(), den.end());
  const double ratio = *hi / *lo;

  const Trajectory ideal = ideal_schedule_solve(schedule, ready, grid);
  const auto den_ideal = denominator_curve(ideal);
  const auto [ilo, ihi] = std::minmax_element(den_ideal.begin(), den_ideal.end());
  const double spread = *ihi - *ilo;

  rec.metric("outcome_sum_defect", sum_defect);
  rec.metric("denominator_ratio", ratio);
  rec.metric("ideal_denominator_spread", spread);
  rec.check(sum_defect < 1e-8, "outcome probabilities do not sum to 1");
  rec.check(ratio > 1.0 + 1e-3, "finite-E denominator too flat");
  rec.check(spread < 1e-8, "ideal denominator not constant");
  return rec.finish();
}

CriterionResult criterion_kuchar(const AcceptanceOptions&) {
  Recorder rec(9, "Double conditioning pathology", 0.0);
  const double energy = 2.0;
  const ConstraintSpace space(ClockModel::periodic(energy, 32), COperator::Zero(2, 2));
  const KucharReport report =
      kuchar_demo(space, basis_vector(2, 0), hadamard().col(0), 0.0, basis_vector(2, 0), kPi / energy);
  rec.metric("naive", report.naive);
  rec.metric("born_joint", report.born_joint);
  rec.metric("born_conditional", report.born_conditional);
  rec.metric("mismatch_reported", report.mismatch ? 1.0 : 0.0);
  rec.check(std::abs(report.naive) < 1e-12, "naive double conditioning not zero");
  rec.check(std::abs(report.born_joint - 0.25) < 1e-12, "Born joint probability not 0.25");
  rec.check(report.mismatch, "discrepancy not reported");
  return rec.finish();
}

CriterionResult criterion_discrete_unitarity(const AcceptanceOptions& options) {
  Recorder rec(10, "Discrete-time unitarity", 0.0);
  std::mt19937_64 rng(options.seed);
  DiscreteEvolution evo;
  for (int k = 0; k < 64; ++k) evo.steps.push_back(haar_unitary(4, rng));
  std::normal_distribution<double> normal;
  CVector psi(4);
  for (Eigen::Index i = 0; i < 4; ++i) psi(i) = Complex(normal(rng), normal(rng));
  psi.normalize();

  const DiscreteSolution sol = discrete_solve(evo, psi);
  double norm_dev = 0.0;
  for (const auto& s : sol.states) norm_dev = std::max(norm_dev, std::abs(s.norm() - 1.0));
  const double residual = discrete_constraint_residual(evo, sol.states).total();
  rec.metric("norm_deviation", norm_dev);
  rec.metric("constraint_residual", residual);
  rec.check(norm_dev < 1e-12, "norm not preserved");
  rec.check(residual < 1e-12, "constraint residual too large");

  // Two events on the lattice t_k = k pi / E, compared with the ideal continuous history.
  const double energy = 2.0;
  const std::size_t count = 16;
  const TimeGrid lattice(0.0, static_cast<double>(count) * kPi / energy, count + 1);
  const COperator h_s = 0.7 * pauli_z() + 0.3 * pauli_x();
  const std::vector<Eigen::Index> ancillas{2, 2};
  const std::vector<PurifiedEvent> events{
      {lattice[3], purification_unitary(KrausSet::computational_basis(2)), 0},
      {lattice[7], purification_unitary(KrausSet::projective(hadamard())), 1}};
  CVector system(2);
  system << Complex(0.6, 0.0), Complex(0.0, 0.8);
  const CVector ready = kron(kron(system, basis_vector(2, 0)), basis_vector(2, 0));

  const DiscreteSolution lattice_sol = discrete_solve(lattice_evolution(h_s, ancillas, events, energy, 0.0, count), ready);
  const Trajectory continuous = pm_ideal_history(h_s, ancillas, events, ready, lattice);
  double match = 0.0;
  for (std::size_t k = 0; k <= count; ++k) {
    match = std::max(match, (continuous.states[k] - lattice_sol.states[k]).norm());
  }
  rec.metric("lattice_vs_continuous", match);
  rec.check(match < 1e-8, "lattice-sampled PM differs from discrete solution");
  return rec.finish();
}

CriterionResult criterion_translation(const AcceptanceOptions&) {
  Recorder rec(11, "PM/TO translation", 0.0);
  const COperator copy = purification_unitary(KrausSet::computational_basis(2));
  const CVector ready = kron(plus_state(), basis_vector(2, 0));
  const double t = 2.0;

  const double ideal_energy = 3.0;
  const TimeGrid wide(-20.0, 4.0, 241);
  const TrajectorySolver ideal_solver = [&](const CVector& p) {
    return pm_ideal_history(COperator::Zero(2, 2), {2}, {{0.5, copy, 0}}, p, wide);
  };
  const auto ideal = pm_to_translation_check(ideal_energy, 16, ideal_solver, ready, 0, 1, t);
  rec.metric("ideal_lhs", ideal.lhs);
  rec.metric("ideal_rhs", ideal.rhs);
  rec.check(std::abs(ideal.lhs - ideal.rhs) < 1e-6, "ideal translation mismatch");

  const double energy = 3.0;
  const InteractionSchedule schedule = partial_copy_schedule(kPi / 4.0);
  BornOptions born;
  born.max_order = 200;
  bool converged = true;
  const TrajectorySolver finite_solver = [&](const CVector& p) {
    auto [tr, report] = born_series_solve(StepKernel::bandlimited(energy), schedule, p,
                                          trajectory_grid(schedule, energy, 0.01 / energy), born);
    converged = converged && report.converged;
    return tr;
  };
  const auto finite = pm_to_translation_check(energy, 16, finite_solver, ready, 0, 1, t);
  rec.metric("finite_lhs", finite.lhs);
  rec.metric("finite_rhs", finite.rhs);
  if (!converged) rec.non_converged("Born series did not converge");
  rec.check(std::abs(finite.lhs - finite.rhs) < 1e-3, "finite-clock translation mismatch");
  return rec.finish();
}

std::vector<CriterionResult> run_acceptance_criteria(const AcceptanceOptions& options) {
  using Fn = CriterionResult (*)(const AcceptanceOptions&);
  constexpr Fn criteria[] = {criterion_kernel_exactness,      criterion_step_approach,
                             criterion_convolution_identities, criterion_ideal_equivalence,
                             criterion_self_consistency,      criterion_nonunitarity,
                             criterion_temporal_order,        criterion_probability_structure,
                             criterion_kuchar,                criterion_discrete_unitarity,
                             criterion_translation};
  std::vector<CriterionResult> out;
  for (Fn fn : criteria) out.push_back(fn(options));
  return out;
}

std::string format_criterion(const CriterionResult& r) {
  std::ostringstream line;
  char seconds[32];
  std::snprintf(seconds, sizeof(seconds), "%.2f", r.seconds);
  line << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.title << " (" << seconds << " s)";
  for (const auto& [name, value] : r.metrics) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6g", value);
    line << ' ' << name << '=' << buffer;
  }
  if (!r.detail.empty()) line << " | " << r.detail;
  return line.str();
}

void write_acceptance_csv(std::ostream& out, const std::vector<CriterionResult>& results) {
  out << "id,title,passed,metric,value\n";
  for (const auto& r : results) {
    // The runtime verdict is left out so the file does not depend on machine load.
    for (const auto& [name, value] : r.metrics) {
      out << r.id << ',' << r.title << ',' << (r.checks_passed ? 1 : 0) << ',' << name << ',' << csv::num(value) << '\n';
    }
  }
}

}  // namespace timeless
