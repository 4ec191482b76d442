#include "timeless/pm_engine.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace timeless;
using namespace timeless::test;

namespace {

InteractionSchedule kick_schedule(double strength) {
  InteractionSchedule schedule(2, {});
  schedule.add_term(WindowFunction::indicator(0.0, 1.0), 0.0, strength * pauli_x());
  return schedule;
}

struct Solved {
  Trajectory trajectory;
  BornSeriesReport report;
};

Solved solve_kick(double energy, double strength, bool parallel = true) {
  const InteractionSchedule schedule = kick_schedule(strength);
  BornOptions options;
  options.parallel = parallel;
  auto [tr, report] = born_series_solve(StepKernel::bandlimited(energy), schedule, basis_vector(2, 0),
                                        trajectory_grid(schedule, energy, 0.01 / energy), options);
  return {std::move(tr), std::move(report)};
}

COperator random_unitary(Eigen::Index dim, std::mt19937_64& rng) {
  return expm_hermitian_generator(random_hermitian(dim, rng), 1.0);
}

}  // namespace

TEST(IdealHistory, NoEventsIsFreeEvolution) {
  const COperator h = 0.7 * pauli_z() + 0.2 * pauli_x();
  const TimeGrid grid(-1.0, 3.0, 81);
  const Trajectory tr = pm_ideal_history(h, {}, {}, plus(), grid);
  for (double t : {-0.5, 0.0, 1.25, 3.0}) {
    EXPECT_LT((tr.at(t) - expm_hermitian_generator(h, t) * plus()).norm(), 1e-12) << t;
  }
  EXPECT_LT(tr.max_norm_deviation(), 1e-12);
}

TEST(IdealHistory, CopyEventAppliesFromEventTime) {
  const COperator copy = purification_unitary(KrausSet::computational_basis(2));
  const CVector ready = kron(plus(), basis_vector(2, 0));
  const Trajectory tr = pm_ideal_history(COperator::Zero(2, 2), {2}, {{1.0, copy, 0}}, ready, TimeGrid(0.0, 2.0, 21));
  EXPECT_NEAR(pm_probability(tr, 0, 0, 0.5).probability, 1.0, 1e-12);
  EXPECT_NEAR(pm_probability(tr, 0, 1, 1.0).probability, 0.5, 1e-12);
  EXPECT_NEAR(pm_probability(tr, 0, 1, 1.5).probability, 0.5, 1e-12);
}

TEST(IdealHistory, SequentialEventsGiveBornJoint) {
  const COperator v1 = purification_unitary(KrausSet::projective(hadamard()));
  const COperator v2 = purification_unitary(KrausSet::computational_basis(2));
  const CVector ready = kron(kron(basis_vector(2, 0), basis_vector(2, 0)), basis_vector(2, 0));
  const Trajectory tr =
      pm_ideal_history(COperator::Zero(2, 2), {2, 2}, {{0.0, v1, 0}, {1.0, v2, 1}}, ready, TimeGrid(-1.0, 2.0, 31));
  const double first = pm_probability(tr, 0, 0, 1.5).probability;
  const double joint = pm_probability(tr, {{0, 0}, {1, 0}}, 1.5).probability;
  EXPECT_NEAR(first, 0.5, 1e-12);
  EXPECT_NEAR(joint, 0.25, 1e-12);
  EXPECT_NEAR(joint / first, 0.5, 1e-12);
}

TEST(IdealHistory, RejectsBadEvents) {
  const COperator copy = purification_unitary(KrausSet::computational_basis(2));
  const CVector ready = kron(plus(), basis_vector(2, 0));
  const TimeGrid grid(0.0, 1.0, 11);
  EXPECT_THROW(pm_ideal_history(COperator::Zero(2, 2), {2}, {{0.5, copy, 1}}, ready, grid), DimensionError);
  EXPECT_THROW(pm_ideal_history(COperator::Zero(2, 2), {2}, {{0.5, 2.0 * copy, 0}}, ready, grid),
               std::invalid_argument);
}

TEST(IdealHistory, PurifiedKrausRule) {
  std::mt19937_64 rng(7);
  const COperator u = random_unitary(4, rng);
  std::vector<COperator> ops;
  for (Eigen::Index a = 0; a < 2; ++a) {
    COperator k(2, 2);
    for (Eigen::Index i = 0; i < 2; ++i) {
      for (Eigen::Index j = 0; j < 2; ++j) k(i, j) = u(2 * i + a, 2 * j);
    }
    ops.push_back(k);
  }
  const KrausSet kraus(ops);
  const CVector psi = random_state(2, rng);
  const Trajectory tr = pm_ideal_history(COperator::Zero(2, 2), {2}, {{0.0, purification_unitary(kraus), 0}},
                                         kron(psi, basis_vector(2, 0)), TimeGrid(-1.0, 1.0, 21));
  const auto expected = kraus_probabilities(kraus, psi);
  for (Eigen::Index a = 0; a < 2; ++a) {
    EXPECT_NEAR(pm_probability(tr, 0, a, 0.5).probability, expected[static_cast<std::size_t>(a)], 1e-12);
  }
}

TEST(IdealScheduleSolve, SingleWindowIsExponential) {
  const InteractionSchedule schedule = kick_schedule(0.5);
  const Trajectory tr = ideal_schedule_solve(schedule, basis_vector(2, 0), TimeGrid(-1.0, 2.0, 301));
  EXPECT_LT((tr.at(1.5) - expm_hermitian_generator(0.5 * pauli_x(), 1.0) * basis_vector(2, 0)).norm(), 1e-10);
  EXPECT_LT((tr.at(0.4) - expm_hermitian_generator(0.5 * pauli_x(), 0.4) * basis_vector(2, 0)).norm(), 1e-10);
  EXPECT_LT((tr.at(-0.5) - basis_vector(2, 0)).norm(), 1e-12);
}

TEST(BornSeries, EmptyScheduleIsConstant) {
  InteractionSchedule schedule(2, {});
  const auto [tr, report] = born_series_solve(StepKernel::bandlimited(5.0), schedule, plus(), TimeGrid(-1.0, 1.0, 11));
  EXPECT_TRUE(report.converged);
  for (const auto& s : tr.states) EXPECT_LT((s - plus()).norm(), 1e-15);
}

TEST(BornSeries, IdealKernelMatchesTimeOrderedExponential) {
  const InteractionSchedule schedule = kick_schedule(0.5);
  const TimeGrid grid(-1.0, 2.0, 31);
  const auto [tr, report] = born_series_solve(StepKernel::ideal(), schedule, basis_vector(2, 0), grid);
  ASSERT_TRUE(report.converged);
  const CVector expected = expm_hermitian_generator(0.5 * pauli_x(), 1.0) * basis_vector(2, 0);
  EXPECT_LT((tr.at(1.5) - expected).norm(), 1e-5);
}

TEST(BornSeries, SigmaXKickSelfConsistent) {
  const Solved s = solve_kick(5.0, 0.5);
  ASSERT_TRUE(s.report.converged);
  EXPECT_LE(s.report.orders_used, 12);
  EXPECT_LT(s.report.residual, 1e-5);
  EXPECT_LT(evolution_residual(s.trajectory), 1e-5);
  EXPECT_LT(history_roundtrip_check(s.trajectory), 1e-4);
  EXPECT_GT(s.trajectory.max_norm_deviation(), 1e-3);
  for (double r : s.report.ratios()) EXPECT_LT(r, 1.0);
}

TEST(BornSeries, CorruptedTrajectoryFailsResidual) {
  Solved s = solve_kick(5.0, 0.5);
  Trajectory corrupted{s.trajectory.grid, s.trajectory.states, s.trajectory.kernel, s.trajectory.factor_dims,
                       s.trajectory.free_hamiltonian};
  for (std::size_t i = 0; i < corrupted.states.size(); ++i) {
    corrupted.states[i] *= std::exp(kI * 3.0 * corrupted.grid[i]);
  }
  EXPECT_GT(evolution_residual(corrupted), 0.1);
}

TEST(BornSeries, OutOfBandHistoryFailsRoundtrip) {
  const double energy = 5.0;
  const TimeGrid grid(-5.0, 5.0, 2001);
  Trajectory tr{grid, {}, StepKernel::bandlimited(energy), {2}, COperator::Zero(2, 2)};
  for (std::size_t i = 0; i < grid.size(); ++i) tr.states.push_back(std::exp(-kI * 3.0 * energy * grid[i]) * plus());
  EXPECT_GE(history_roundtrip_check(tr), 0.1);
}

TEST(BornSeries, EmptyHistoryRoundtrip) {
  InteractionSchedule schedule(2, {});
  schedule.add_term(WindowFunction::indicator(0.0, 1.0), 0.0, COperator::Zero(2, 2));
  const auto [tr, report] =
      born_series_solve(StepKernel::bandlimited(5.0), schedule, plus(), trajectory_grid(schedule, 5.0, 0.002));
  EXPECT_LT(history_roundtrip_check(tr), 1e-6);
}

TEST(BornSeries, DeltaKickMatchesClosedForm) {
  const double energy = 4.0;
  const COperator k = 0.6 * pauli_x();
  InteractionSchedule schedule(2, {});
  schedule.add_term(WindowFunction::delta(), 0.0, k);
  const TimeGrid grid(-3.0, 3.0, 61);
  const auto [tr, report] = born_series_solve(StepKernel::bandlimited(energy), schedule, basis_vector(2, 0), grid);
  ASSERT_TRUE(report.converged);
  for (double t : {-2.0, 0.0, 0.7, 3.0}) {
    const double f = cumulative_kernel_F(energy, t);
    const CVector expected = delta_kick_closed_form(k, f) * basis_vector(2, 0);
    EXPECT_LT((tr.at(t) - expected).norm(), 1e-8) << t;
  }
}

TEST(DeltaKick, ClosedFormAgreesWithSeries) {
  DeltaKickValidation v;
  const COperator m = delta_kick_closed_form(pauli_x(), 0.5, &v);
  EXPECT_LT(max_abs(m - delta_kick_series(pauli_x(), 0.5, 50)), 1e-12);
  EXPECT_NEAR(v.spectral_radius, 0.5, 1e-15);
  const Eigen::VectorXd sv = Eigen::JacobiSVD<COperator>(m).singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i) EXPECT_NEAR(sv(i), 2.0 / std::sqrt(5.0), 1e-12);
}

TEST(DeltaKick, UnitaryAtFullStep) {
  const COperator m = delta_kick_closed_form(pauli_x(), 1.0);
  EXPECT_TRUE(is_unitary(m));
  COperator cayley = (2.0 * identity(2) - kI * pauli_x()) * (2.0 * identity(2) + kI * pauli_x()).inverse();
  EXPECT_LT(max_abs(m - cayley), 1e-12);
}

TEST(DeltaKick, DivergentSeriesRejected) {
  try {
    delta_kick_closed_form(3.0 * pauli_x(), 0.5);
    FAIL() << "expected SeriesDivergenceError";
  } catch (const SeriesDivergenceError& e) {
    EXPECT_NEAR(e.spectral_radius(), 1.5, 1e-12);
  }
}

TEST(PMProbability, FiniteClockStructure) {
  const double energy = 5.0;
  InteractionSchedule schedule(2, {2});
  schedule.add_term(WindowFunction::indicator(0.0, 1.0), 0.0,
                    0.5 * kron(projector(basis_vector(2, 1)), identity(2) - pauli_x()));
  const CVector ready = schedule.ready_state(plus());
  const TimeGrid grid = trajectory_grid(schedule, energy, 0.002);
  const auto [tr, report] = born_series_solve(StepKernel::bandlimited(energy), schedule, ready, grid);
  ASSERT_TRUE(report.converged);
  for (double t : {-1.0, 0.5, 1.0, 4.0}) {
    const double sum = pm_probability(tr, 0, 0, t).probability + pm_probability(tr, 0, 1, t).probability;
    EXPECT_NEAR(sum, 1.0, 1e-10) << t;
  }
  const auto den = denominator_curve(tr);
  const auto [lo, hi] = std::minmax_element(den.begin(), den.end());
  EXPECT_GT(*hi / *lo, 1.001);

  const Trajectory ideal = ideal_schedule_solve(schedule, ready, grid);
  const auto flat = denominator_curve(ideal);
  const auto [ilo, ihi] = std::minmax_element(flat.begin(), flat.end());
  EXPECT_LT(*ihi - *ilo, 1e-8);
}

TEST(PMProbability, UnreachableTime) {
  const TimeGrid grid(0.0, 1.0, 3);
  const CVector zero = CVector::Zero(4);
  Trajectory tr{grid, {zero, zero, zero}, StepKernel::ideal(), {2, 2}, COperator::Zero(4, 4)};
  EXPECT_THROW(pm_probability(tr, 0, 0, 0.5), UnreachableTimeError);
  EXPECT_THROW(pm_probability(tr, 1, 0, 0.5), DimensionError);
}

TEST(BornSeries, ReportsNonConvergence) {
  const InteractionSchedule schedule = kick_schedule(0.5);
  BornOptions options;
  options.max_order = 2;
  options.tolerance = 1e-14;
  const auto [tr, report] = born_series_solve(StepKernel::bandlimited(5.0), schedule, basis_vector(2, 0),
                                              trajectory_grid(schedule, 5.0, 0.002), options);
  EXPECT_FALSE(report.converged);
  EXPECT_EQ(report.orders_used, 2);
  EXPECT_EQ(report.term_norms.size(), 2u);
}

TEST(BornSeries, ParallelMatchesReference) {
  const double energy = 5.0;
  const InteractionSchedule schedule = kick_schedule(0.5);
  const TimeGrid grid = trajectory_grid(schedule, energy, 0.01);
  BornOptions options;
  options.node_spacing = 0.01;
  const auto kernel = StepKernel::bandlimited(energy);
  const auto [fast, r1] = born_series_solve(kernel, schedule, basis_vector(2, 0), grid, options);
  options.parallel = false;
  const auto [serial, r2] = born_series_solve(kernel, schedule, basis_vector(2, 0), grid, options);
  const auto [ref, r3] = born_series_solve_reference(kernel, schedule, basis_vector(2, 0), grid, options);
  EXPECT_EQ(r1.orders_used, r3.orders_used);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_LT((fast.states[i] - serial.states[i]).norm(), 1e-14);
    EXPECT_LT((fast.states[i] - ref.states[i]).norm(), 1e-10);
  }
}

TEST(PeriodicSolve, EmptyScheduleIsPeriodic) {
  const auto clock = ClockModel::periodic(2.0, 8);
  const InteractionSchedule schedule(2, {});
  const PeriodicSolution sol = periodic_pm_solve(clock, schedule, plus());
  EXPECT_LT(sol.periodicity_residual, 1e-8);
}

TEST(PeriodicSolve, WeakKickConvergesQuickly) {
  const auto clock = ClockModel::periodic(5.0, 8);
  InteractionSchedule schedule(2, {});
  schedule.add_term(WindowFunction::indicator(0.0, 1.0), 2.0, 0.1 * pauli_x());
  const PeriodicSolution sol = periodic_pm_solve(clock, schedule, basis_vector(2, 0));
  EXPECT_TRUE(sol.report.converged);
  EXPECT_LE(sol.report.orders_used, 6);
  const auto& norms = sol.report.term_norms;
  for (std::size_t i = 1; i < norms.size(); ++i) EXPECT_LT(norms[i], norms[i - 1]);
}

TEST(PeriodicSolve, ResidualShrinksWithCoupling) {
  const auto clock = ClockModel::periodic(5.0, 8);
  double previous = 1e300;
  for (double g : {0.2, 0.1, 0.05}) {
    InteractionSchedule schedule(2, {});
    schedule.add_term(WindowFunction::indicator(0.0, 1.0), 2.0, g * pauli_x());
    const double r = periodic_pm_solve(clock, schedule, basis_vector(2, 0), {}, 0.05).periodicity_residual;
    EXPECT_LT(r, previous) << g;
    previous = r;
  }
}

TEST(PeriodicSolve, RejectsWindowOutsidePeriod) {
  const auto clock = ClockModel::periodic(2.0, 8);
  InteractionSchedule schedule(2, {});
  schedule.add_term(WindowFunction::indicator(0.0, 1.0), clock.period(), pauli_x());
  EXPECT_THROW(periodic_pm_solve(clock, schedule, plus()), std::invalid_argument);
}

TEST(Translation, IdealCopy) {
  const COperator copy = purification_unitary(KrausSet::computational_basis(2));
  const TimeGrid grid(-20.0, 4.0, 241);
  const TrajectorySolver solver = [&](const CVector& p) {
    return pm_ideal_history(COperator::Zero(2, 2), {2}, {{0.5, copy, 0}}, p, grid);
  };
  const auto r = pm_to_translation_check(3.0, 16, solver, kron(plus(), basis_vector(2, 0)), 0, 1, 2.0);
  EXPECT_NEAR(r.lhs, 0.5, 1e-12);
  EXPECT_NEAR(r.lhs, r.rhs, 1e-6);
}

TEST(Translation, NoInteractionGivesCertainty) {
  const TimeGrid grid(-20.0, 4.0, 241);
  const TrajectorySolver solver = [&](const CVector& p) {
    return pm_ideal_history(COperator::Zero(2, 2), {2}, {}, p, grid);
  };
  const auto r = pm_to_translation_check(3.0, 16, solver, kron(plus(), basis_vector(2, 0)), 0, 0, 2.0);
  EXPECT_NEAR(r.lhs, 1.0, 1e-12);
  EXPECT_NEAR(r.rhs, 1.0, 1e-8);
}
