#include "timeless/experiments.hpp"

#include "timeless/acceptance.hpp"
#include "timeless/csv.hpp"
#include "timeless/discrete_time.hpp"
#include "timeless/io.hpp"
#include "timeless/pm_engine.hpp"
#include "timeless/temporal_order.hpp"
#include "timeless/to_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#ifndef TIMELESS_VERSION
#define TIMELESS_VERSION "0.0.0"
#endif

namespace timeless {

namespace {

constexpr double kPi = std::numbers::pi;

struct Run {
  const ExperimentConfig& config;
  OutputDirectory& out;
  RunManifest& manifest;

  void less(const std::string& name, double value, double threshold) {
    manifest.checks.push_back({name, value < threshold, value, threshold, "<", ""});
  }
  void greater(const std::string& name, double value, double threshold) {
    manifest.checks.push_back({name, value > threshold, value, threshold, ">", ""});
  }
  void equal(const std::string& name, double value, double expected) {
    manifest.checks.push_back({name, value == expected, value, expected, "==", ""});
  }
  void flag(const std::string& name, bool ok, const std::string& comparison) {
    manifest.checks.push_back({name, ok, ok ? 1.0 : 0.0, 1.0, comparison, ""});
  }
};

std::string label(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%g", x);
  return buffer;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

ClockModel make_clock(const ClockSpec& spec) {
  switch (spec.kind) {
    case ClockKind::ContinuumBounded:
      return ClockModel::continuum(spec.energy);
    case ClockKind::PeriodicFinite:
      return ClockModel::periodic(spec.energy, spec.dimension);
    case ClockKind::DiscreteOrthogonal:
      return ClockModel::discrete(spec.energy, spec.dimension);
  }
  throw std::logic_error("unknown clock kind");
}

ClockModel finite_clock(const ExperimentConfig& config, double energy, int dimension) {
  return config.clock ? make_clock(*config.clock) : ClockModel::periodic(energy, dimension);
}

COperator pauli_x() {
  COperator m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

COperator hadamard() {
  COperator m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

InteractionSchedule schedule_or(const ExperimentConfig& config, const std::function<InteractionSchedule()>& fallback) {
  return config.schedule ? io::schedule_from_json(*config.schedule) : fallback();
}

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Antiderivative of F: x/2 + (x Si(Ex) + cos(Ex)/E) / pi.
double step_antiderivative(double energy, double x) {
  return 0.5 * x + (x * sine_integral(energy * x) + std::cos(energy * x) / energy) / kPi;
}

void kernel_fig1(Run& run) {
  const auto energies = sorted(run.config.parameter_list("energies", {1.0, 5.0, 25.0}));
  const TimeGrid grid = run.config.grid ? run.config.grid->grid() : TimeGrid(-10.0, 10.0, 2001);
  Json summary = Json::array();
  std::vector<double> deviations;
  for (double energy : energies) {
    std::ostringstream table;
    write_kernel_table(table, energy, grid);
    run.out.write("kernel_E" + label(energy) + ".csv", table.str());

    run.less("F0_E" + label(energy), std::abs(cumulative_kernel_F(energy, 0.0) - 0.5), run.config.tolerance("F0"));
    double symmetry = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      symmetry = std::max(symmetry, std::abs(cumulative_kernel_F(energy, grid[i]) +
                                             cumulative_kernel_F(energy, -grid[i]) - 1.0));
    }
    run.less("symmetry_E" + label(energy), symmetry, run.config.tolerance("symmetry"));

    deviations.push_back(max_step_deviation(energy, 1.0, 200.0, 2000));
    summary.push_back({{"E", energy}, {"max_step_deviation", deviations.back()}});
  }
  run.out.write("step_deviation.json", summary.dump(2) + "\n");
  run.flag("step_deviation_decreasing", strictly_decreasing(deviations), "decreasing");
}

void first_order_fig2(Run& run) {
  WindowFunction window = WindowFunction::indicator(0.0, 1.0);
  double tau = 0.0;
  if (run.config.schedule) {
    const auto schedule = io::schedule_from_json(*run.config.schedule);
    window = schedule.terms().front().window;
    tau = schedule.terms().front().center;
  }
  const auto energies = sorted(run.config.parameter_list("energies", {1.0, 5.0, 25.0}));
  const double spacing = run.config.parameter("spacing", 1e-3);
  const TimeGrid grid = run.config.grid ? run.config.grid->grid() : TimeGrid(-3.0, 5.0, 801);
  std::vector<double> times(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) times[i] = grid[i];

  std::vector<std::vector<double>> columns;
  columns.push_back(first_order_magnitude(StepKernel::ideal(), window, tau, times, spacing));
  for (double energy : energies) {
    columns.push_back(first_order_magnitude(StepKernel::bandlimited(energy), window, tau, times, spacing));
    if (window.kind() == WindowKind::Indicator) {
      double worst = 0.0;
      for (std::size_t i = 0; i < times.size(); ++i) {
        const double x = times[i] - tau;
        const double closed = window.scale() * (step_antiderivative(energy, x - window.a()) -
                                                step_antiderivative(energy, x - window.b()));
        worst = std::max(worst, std::abs(columns.back()[i] - std::abs(closed)));
      }
      run.less("closed_form_E" + label(energy), worst, run.config.tolerance("closed_form"));
    }
  }

  std::ostringstream table;
  table << "t,ideal";
  for (double energy : energies) table << ",E" << label(energy);
  table << '\n';
  for (std::size_t i = 0; i < times.size(); ++i) {
    table << csv::num(times[i]);
    for (const auto& c : columns) table << ',' << csv::num(c[i]);
    table << '\n';
  }
  run.out.write("first_order.csv", table.str());
}

void heatmap_fig3(Run& run) {
  const double energy = run.config.clock ? run.config.clock->energy : 5.0;
  const double t = run.config.parameter("t", 10.0);
  const TimeGrid grid = run.config.grid ? run.config.grid->grid() : TimeGrid(-1.0, 5.0, 121);

  const Eigen::MatrixXd finite = heatmap_product(StepKernel::bandlimited(energy), t, grid, grid);
  const Eigen::MatrixXd ideal = heatmap_product(StepKernel::ideal(), t, grid, grid);
  std::ostringstream finite_csv, ideal_csv;
  write_heatmap_csv(finite_csv, grid, grid, finite);
  write_heatmap_csv(ideal_csv, grid, grid, ideal);
  run.out.write("heatmap_E" + label(energy) + ".csv", finite_csv.str());
  run.out.write("heatmap_ideal.csv", ideal_csv.str());

  // Region t1 < t2: the later event would act first.
  double ideal_max = 0.0;
  double finite_max = 0.0;
  for (Eigen::Index i = 0; i < finite.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < finite.cols(); ++j) {
      ideal_max = std::max(ideal_max, std::abs(ideal(i, j)));
      finite_max = std::max(finite_max, std::abs(finite(i, j)));
    }
  }
  run.equal("ideal_acausal_region_max", ideal_max, 0.0);
  run.greater("finite_acausal_region_max", finite_max, run.config.tolerance("acausal_weight"));
}

void ideal_equivalence(Run& run) {
  const ClockModel clock = finite_clock(run.config, 2.0, 32);
  const double tau1 = run.config.parameter("tau1", 0.0);
  const double tau2 = run.config.parameter("tau2", tau1 + clock.time_step());
  const double t_read = run.config.parameter("t_read", tau2 + 1.0);
  const COperator h_s = COperator::Zero(2, 2);
  const CVector psi0 = basis_vector(2, 0);
  const COperator first_basis = hadamard();
  const COperator second_basis = identity(2);

  const std::vector<Eigen::Index> ancillas{2, 2};
  const CVector ready = kron(kron(psi0, basis_vector(2, 0)), basis_vector(2, 0));
  const TimeGrid grid(std::min(0.0, tau1) - 1.0, std::max(t_read, tau2) + 1.0, 401);
  const Trajectory pm = pm_ideal_history(
      h_s, ancillas,
      {{tau1, purification_unitary(KrausSet::projective(first_basis)), 0},
       {tau2, purification_unitary(KrausSet::projective(second_basis)), 1}},
      ready, grid);
  const ConstraintSpace space(clock, h_s);

  std::ostringstream table;
  table << "tau1,tau2,outcome_k,outcome_q,P_PM,P_TO,P_Born,max_abs_dP\n";
  double worst = 0.0;
  for (Eigen::Index k = 0; k < 2; ++k) {
    const COperator pi_k = first_basis.col(k) * first_basis.col(k).adjoint();
    for (Eigen::Index q = -1; q < 2; ++q) {
      // q = -1: the second outcome is summed over.
      const COperator pi_q = q < 0 ? identity(2) : COperator(second_basis.col(q) * second_basis.col(q).adjoint());
      const double p_pm = q < 0 ? pm_probability(pm, 0, k, t_read).probability
                                : pm_probability(pm, {{0, k}, {1, q}}, t_read).probability;
      const auto to = two_time_probability_TO(space, psi0, pi_k, tau1, pi_q, tau2);
      const double dp = std::max({std::abs(p_pm - to.p_to), std::abs(p_pm - to.p_born), std::abs(to.p_to - to.p_born)});
      worst = std::max(worst, dp);
      table << csv::num(tau1) << ',' << csv::num(tau2) << ',' << k << ',' << q << ',' << csv::num(p_pm) << ','
            << csv::num(to.p_to) << ',' << csv::num(to.p_born) << ',' << csv::num(dp) << '\n';
    }
  }
  run.out.write("probabilities.csv", table.str());
  run.less("max_abs_dP", worst, run.config.tolerance("equivalence"));
}

void nonunitarity_scan(Run& run) {
  const InteractionSchedule schedule = schedule_or(run.config, [] {
    InteractionSchedule s(2, {});
    s.add_term(WindowFunction::indicator(0.0, 1.0), 0.0, 0.5 * pauli_x());
    return s;
  });
  const CVector ready = schedule.ready_state(basis_vector(schedule.system_dim(), 0));
  const auto energies = sorted(run.config.parameter_list("energies", {5.0, 10.0, 20.0}));
  BornOptions options;
  options.tolerance = run.config.tolerance("born");
  options.max_order = static_cast<int>(run.config.parameter("max_order", 40));

  std::ostringstream summary;
  summary << "E,orders_used,converged,residual,max_norm_deviation,distance_to_ideal,denominator_ratio\n";
  std::vector<double> distances;
  double first_norm_loss = 0.0;
  for (double energy : energies) {
    const TimeGrid grid = trajectory_grid(schedule, energy, run.config.parameter("spacing", 0.01 / energy));
    const Trajectory ideal = schedule.has_delta_terms()
                                 ? born_series_solve(StepKernel::ideal(), schedule, ready, grid, options).first
                                 : ideal_schedule_solve(schedule, ready, grid);
    const auto [trajectory, report] = born_series_solve(StepKernel::bandlimited(energy), schedule, ready, grid, options);

    double distance = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      distance = std::max(distance, (trajectory.states[i] - ideal.states[i]).norm());
    }
    const auto den = denominator_curve(trajectory);
    const auto [lo, hi] = std::minmax_element(den.begin(), den.end());
    distances.push_back(distance);
    if (distances.size() == 1) first_norm_loss = trajectory.max_norm_deviation();

    std::ostringstream table;
    io::write_trajectory_csv(table, trajectory);
    run.out.write("trajectory_E" + label(energy) + ".csv", table.str());
    run.out.write("born_E" + label(energy) + ".json", io::to_json(report).dump(2) + "\n");
    summary << csv::num(energy) << ',' << report.orders_used << ',' << (report.converged ? 1 : 0) << ','
            << csv::num(report.residual) << ',' << csv::num(trajectory.max_norm_deviation()) << ','
            << csv::num(distance) << ',' << csv::num(*hi / *lo) << '\n';

    run.flag("converged_E" + label(energy), report.converged, "true");
    if (!report.converged) run.manifest.converged = false;
  }
  run.out.write("nonunitarity.csv", summary.str());
  run.flag("distance_to_ideal_decreasing", strictly_decreasing(distances), "decreasing");
  run.greater("norm_loss_E" + label(energies.front()), first_norm_loss, run.config.tolerance("nonunitarity"));
}

void acausal_scan(Run& run) {
  const InteractionSchedule schedule = schedule_or(run.config, [] {
    InteractionSchedule s(2, {});
    s.add_term(WindowFunction::indicator(0.0, 1.0), 0.0, pauli_x());
    s.add_term(WindowFunction::indicator(0.0, 1.0), 3.0, pauli_x());
    return s;
  });
  const WindowFunction& window = schedule.terms()[0].window;
  const double tau1 = schedule.terms()[0].center;
  const double tau2 = schedule.terms()[1].center;
  const double t = run.config.parameter("t", 10.0);
  const double spacing = run.config.parameter("spacing", 0.005);
  const auto energies = sorted(run.config.parameter_list("energies", {2.0, 5.0, 10.0, 20.0}));

  std::vector<CoefficientRow> rows;
  std::vector<double> magnitudes;
  for (double energy : energies) {
    rows.push_back({energy, second_order_coefficients(StepKernel::bandlimited(energy), window, tau1, tau2, t, spacing)});
    magnitudes.push_back(std::abs(rows.back().coefficients.acausal));
  }
  std::ostringstream table;
  write_coefficient_scan(table, rows);
  run.out.write("acausal_scan.csv", table.str());

  const auto ideal = second_order_coefficients(StepKernel::ideal(), window, tau1, tau2, t, spacing);
  run.equal("ideal_acausal", ideal.acausal, 0.0);
  run.flag("acausal_strictly_decreasing", strictly_decreasing(magnitudes), "decreasing");
}

void discrete_unitarity(Run& run) {
  std::mt19937_64 rng(run.config.seed);
  const auto count = static_cast<std::size_t>(run.config.parameter("steps", 64));
  const auto dims = run.config.parameters.value("dims", std::vector<Eigen::Index>{2, 2});
  const Eigen::Index dim = product(dims);
  DiscreteEvolution evo;
  evo.boundary = run.config.parameters.value("boundary", "open") == "periodic" ? Boundary::Periodic : Boundary::OpenLine;
  for (std::size_t k = 0; k < count; ++k) evo.steps.push_back(haar_unitary(dim, rng));
  std::normal_distribution<double> normal;
  CVector psi(dim);
  for (Eigen::Index i = 0; i < dim; ++i) psi(i) = Complex(normal(rng), normal(rng));
  psi.normalize();

  const DiscreteSolution sol = discrete_solve(evo, psi);
  const ConstraintResidual residual = discrete_constraint_residual(evo, sol.states);
  std::ostringstream norms;
  norms << "k,norm,norm_deviation\n";
  double worst = 0.0;
  for (std::size_t k = 0; k < sol.states.size(); ++k) {
    const double n = sol.states[k].norm();
    worst = std::max(worst, std::abs(n - 1.0));
    norms << k << ',' << csv::num(n) << ',' << csv::num(std::abs(n - 1.0)) << '\n';
  }
  run.out.write("norms.csv", norms.str());
  run.out.write("steps.json", io::steps_to_json(evo.steps).dump() + "\n");
  run.less("norm_deviation", worst, run.config.tolerance("norm"));
  run.less("constraint_residual", residual.total(), run.config.tolerance("residual"));

  // Lattice-sampled purified run: two events on t_k = k pi / E.
  const double energy = run.config.clock ? run.config.clock->energy : 2.0;
  const std::size_t lattice_count = 16;
  const TimeGrid lattice(0.0, static_cast<double>(lattice_count) * kPi / energy, lattice_count + 1);
  COperator h_s(2, 2);
  h_s << 0.7, 0.3, 0.3, -0.7;
  const std::vector<Eigen::Index> ancillas{2, 2};
  const std::vector<PurifiedEvent> events{
      {lattice[3], purification_unitary(KrausSet::computational_basis(2)), 0},
      {lattice[7], purification_unitary(KrausSet::projective(hadamard())), 1}};
  CVector system(2);
  system << Complex(0.6, 0.0), Complex(0.0, 0.8);
  const CVector ready = kron(kron(system, basis_vector(2, 0)), basis_vector(2, 0));
  const DiscreteSolution discrete =
      discrete_solve(lattice_evolution(h_s, ancillas, events, energy, 0.0, lattice_count), ready);
  const Trajectory continuous = pm_ideal_history(h_s, ancillas, events, ready, lattice);
  std::ostringstream match;
  match << "k,t,distance\n";
  double lattice_worst = 0.0;
  for (std::size_t k = 0; k <= lattice_count; ++k) {
    const double d = (continuous.states[k] - discrete.states[k]).norm();
    lattice_worst = std::max(lattice_worst, d);
    match << k << ',' << csv::num(lattice[k]) << ',' << csv::num(d) << '\n';
  }
  run.out.write("lattice.csv", match.str());
  run.less("lattice_vs_continuous", lattice_worst, run.config.tolerance("lattice"));
}

void translation_check(Run& run) {
  const double energy = run.config.clock ? run.config.clock->energy : 3.0;
  const int dimension = run.config.clock ? run.config.clock->dimension : 16;
  const double t = run.config.parameter("t", 2.0);
  const double strength = run.config.parameter("coupling_strength", kPi / 4.0);
  const COperator copy = purification_unitary(KrausSet::computational_basis(2));
  const CVector plus = (basis_vector(2, 0) + basis_vector(2, 1)) / std::sqrt(2.0);
  const CVector ready = kron(plus, basis_vector(2, 0));
  const double span = static_cast<double>(dimension) * kPi / energy;

  const TimeGrid wide(t - span - 1.0, t + 1.0, 401);
  const double tau = 0.5;
  const auto ideal = pm_to_translation_check(
      energy, dimension,
      [&](const CVector& p) { return pm_ideal_history(COperator::Zero(2, 2), {2}, {{tau, copy, 0}}, p, wide); },
      ready, 0, 1, t);

  InteractionSchedule schedule(2, {2});
  COperator p1 = basis_vector(2, 1) * basis_vector(2, 1).adjoint();
  schedule.add_term(WindowFunction::indicator(0.0, 1.0), 0.0, strength * kron(p1, identity(2) - pauli_x()));
  BornOptions options;
  options.max_order = static_cast<int>(run.config.parameter("max_order", 200));
  bool converged = true;
  const auto finite = pm_to_translation_check(
      energy, dimension,
      [&](const CVector& p) {
        auto [tr, report] = born_series_solve(StepKernel::bandlimited(energy), schedule, p,
                                              trajectory_grid(schedule, energy, 0.01 / energy), options);
        converged = converged && report.converged;
        return tr;
      },
      ready, 0, 1, t);

  std::ostringstream table;
  table << "backend,t,lhs,rhs,abs_diff\n";
  table << "ideal," << csv::num(ideal.t) << ',' << csv::num(ideal.lhs) << ',' << csv::num(ideal.rhs) << ','
        << csv::num(std::abs(ideal.lhs - ideal.rhs)) << '\n';
  table << "finite," << csv::num(finite.t) << ',' << csv::num(finite.lhs) << ',' << csv::num(finite.rhs) << ','
        << csv::num(std::abs(finite.lhs - finite.rhs)) << '\n';
  run.out.write("translation.csv", table.str());
  run.less("ideal_abs_diff", std::abs(ideal.lhs - ideal.rhs), run.config.tolerance("ideal"));
  run.less("finite_abs_diff", std::abs(finite.lhs - finite.rhs), run.config.tolerance("finite"));
  run.flag("finite_born_converged", converged, "true");
  if (!converged) run.manifest.converged = false;
}

void kuchar(Run& run) {
  const ClockModel clock = finite_clock(run.config, 2.0, 32);
  const double tau = run.config.parameter("tau", 0.0);
  const double tau_prime = run.config.parameter("tau_prime", tau + clock.time_step());
  const ConstraintSpace space(clock, COperator::Zero(2, 2));
  const KucharReport report =
      kuchar_demo(space, basis_vector(2, 0), hadamard().col(0), tau, basis_vector(2, 0), tau_prime);
  std::ostringstream table;
  table << "tau,tau_prime,naive,born_joint,born_conditional,clock_overlap,mismatch\n";
  table << csv::num(tau) << ',' << csv::num(tau_prime) << ',' << csv::num(report.naive) << ','
        << csv::num(report.born_joint) << ',' << csv::num(report.born_conditional) << ','
        << csv::num(report.clock_overlap) << ',' << (report.mismatch ? 1 : 0) << '\n';
  run.out.write("kuchar.csv", table.str());
  run.less("naive_abs", std::abs(report.naive), run.config.tolerance("naive"));
  run.flag("mismatch_reported", report.mismatch, "true");
}

void acceptance_suite(Run& run) {
  AcceptanceOptions options;
  options.seed = run.config.seed;
  const auto results = run_acceptance_criteria(options);
  std::ostringstream table;
  write_acceptance_csv(table, results);
  run.out.write("acceptance.csv", table.str());
  for (const auto& r : results) {
    run.manifest.checks.push_back(
        {"criterion_" + std::to_string(r.id), r.passed, r.seconds, r.runtime_limit, r.runtime_limit > 0.0 ? "seconds <" : "seconds", r.title + (r.detail.empty() ? "" : ": " + r.detail)});
    if (!r.converged) run.manifest.converged = false;
  }
}

using Runner = void (*)(Run&);

Runner find_runner(const std::string& name) {
  static const std::vector<std::pair<std::string, Runner>> table = {
      {"kernel-fig1", kernel_fig1},           {"first-order-fig2", first_order_fig2},
      {"heatmap-fig3", heatmap_fig3},         {"ideal-equivalence", ideal_equivalence},
      {"nonunitarity-scan", nonunitarity_scan}, {"acausal-scan", acausal_scan},
      {"discrete-unitarity", discrete_unitarity}, {"translation-check", translation_check},
      {"kuchar-demo", kuchar},                {"acceptance-suite", acceptance_suite},
  };
  for (const auto& [key, fn] : table) {
    if (key == name) return fn;
  }
  throw ConfigError({{"experiment", "unknown experiment '" + name + "'"}});
}

}  // namespace

std::string_view artifact_version() { return TIMELESS_VERSION; }

RunManifest run_experiment(const ExperimentConfig& config, const std::filesystem::path& output_dir) {
  const Runner runner = find_runner(config.experiment);
  RunManifest manifest;
  manifest.experiment = config.experiment;
  manifest.config = config.source;
  manifest.version = std::string(artifact_version());
  OutputDirectory out(output_dir);
  Run run{config, out, manifest};

  const auto start = std::chrono::steady_clock::now();
  const auto finish = [&] {
    manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest.outputs = out.files();
    write_manifest(output_dir, manifest);
  };
  try {
    runner(run);
  } catch (const NonConvergenceError& e) {
    manifest.converged = false;
    manifest.error = e.what();
  } catch (const std::exception& e) {
    manifest.error = e.what();
    finish();
    throw;
  }
  finish();
  return manifest;
}

RunManifest run_experiment(const ExperimentConfig& config) { return run_experiment(config, resolve_output_dir(config)); }

}  // namespace timeless
