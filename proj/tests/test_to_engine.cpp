#include "timeless/to_engine.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

using namespace timeless;
using namespace timeless::test;

namespace {

constexpr double kPi = std::numbers::pi;

COperator diag2(double a, double b) {
  COperator m = COperator::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST(HistoryState, StaticSystemConditionsToPsi0) {
  const auto clock = ClockModel::periodic(1.0, 8);
  const auto history = free_history_state(clock, COperator::Zero(2, 2), plus());
  EXPECT_TRUE(history.resonant);
  const ConstraintSpace space(clock, COperator::Zero(2, 2));
  for (double t : {0.0, 0.3, 2.9, 11.0}) {
    const CVector c = space.condition(history.unnormalized(), t);
    EXPECT_LT((c - plus()).norm(), 1e-10) << t;
  }
}

TEST(HistoryState, InBandSpectrumSatisfiesConstraint) {
  const auto clock = ClockModel::periodic(2.0, 16);
  const double e1 = 5 * clock.level_spacing();
  const auto history = free_history_state(clock, diag2(0.0, e1), plus());
  EXPECT_LT(history.residual, 1e-8);
  EXPECT_TRUE(history.resonant);
}

TEST(HistoryState, ConditionedStateFollowsSchrodinger) {
  const auto clock = ClockModel::periodic(2.0, 32);
  const COperator h_s = diag2(0.0, 3 * clock.level_spacing());
  const ConstraintSpace space(clock, h_s);
  const CVector psi = free_history_state(clock, h_s, plus()).unnormalized();
  const double h = 1e-3;
  for (double t : {0.2, 1.1, 4.0}) {
    const CVector lhs = kI * (space.condition(psi, t + h) - space.condition(psi, t - h)) / (2 * h);
    EXPECT_LT((lhs - h_s * space.condition(psi, t)).norm(), 1e-5) << t;
    EXPECT_LT((space.condition(psi, t) - space.system_propagator(t) * plus()).norm(), 1e-10);
  }
}

TEST(Twirl, IdentityLandsInCommutant) {
  const auto clock = ClockModel::periodic(1.0, 8);
  const ConstraintSpace space(clock, diag2(0.0, 0.37));
  const auto t = twirl(space, identity(2), 0.4);
  EXPECT_LT(space.commutator_defect(t.matrix), 1e-10);
  // Nondegenerate spectrum: the twirl of |phi_tau><phi_tau| (x) 1 is the identity.
  EXPECT_LT(max_abs(t.matrix - identity(space.dim())), 1e-10);
}

TEST(Twirl, CommutesWithConstraintOnDegenerateSpectrum) {
  const auto clock = ClockModel::periodic(2.0, 8);
  const ConstraintSpace space(clock, diag2(0.0, clock.level_spacing()));
  const auto t = twirl(space, pauli_x(), 0.9);
  EXPECT_LT(space.commutator_defect(t.matrix), 1e-10);
  const COperator& p = space.null_projector();
  EXPECT_LT(max_abs(p * t.matrix - t.matrix * p), 1e-10);
}

TEST(Twirl, CovariantInTau) {
  const auto clock = ClockModel::periodic(1.5, 8);
  const ConstraintSpace space(clock, diag2(-0.2, 0.45));
  const double tau = 0.3, s = 1.7;
  const COperator u = kron(expm_hermitian_generator(clock.hamiltonian(), s), identity(2));
  const COperator shifted = u * twirl(space, projector(plus()), tau).matrix * u.adjoint();
  EXPECT_LT(max_abs(twirl(space, projector(plus()), tau + s).matrix - shifted), 1e-9);
}

TEST(TwoTimeProbability, SigmaXThenSigmaZ) {
  const ConstraintSpace space(ClockModel::periodic(2.0, 32), COperator::Zero(2, 2));
  const auto p = two_time_probability_TO(space, basis_vector(2, 0), projector(plus()), 0.0,
                                         projector(basis_vector(2, 0)), 1.0);
  EXPECT_NEAR(p.p_to, 0.25, 1e-8);
  EXPECT_NEAR(p.p_born, 0.25, 1e-15);
}

TEST(TwoTimeProbability, MarginalizesAndNormalizes) {
  const auto clock = ClockModel::periodic(2.0, 32);
  const COperator h_s = diag2(0.0, 7 * clock.level_spacing()) + 0.0 * pauli_x();
  const ConstraintSpace space(clock, h_s);
  const CVector psi0 = plus();
  const COperator pi_q = projector(plus());
  const double tau2 = 1.3;
  const auto one = two_time_probability_TO(space, psi0, identity(2), 0.2, pi_q, tau2);
  const double expected = (pi_q * space.system_propagator(tau2) * psi0).squaredNorm();
  EXPECT_NEAR(one.p_to, expected, 1e-10);
  const auto both = two_time_probability_TO(space, psi0, identity(2), 0.2, identity(2), tau2);
  EXPECT_NEAR(both.p_to, 1.0, 1e-10);
}

TEST(TwoTimeProbability, ConvenienceOverloadMatches) {
  const auto clock = ClockModel::periodic(2.0, 16);
  const COperator h = COperator::Zero(2, 2);
  const auto a = two_time_probability_TO(clock, h, basis_vector(2, 0), projector(plus()), 0.0,
                                         projector(basis_vector(2, 1)), 2.0);
  EXPECT_NEAR(a.p_to, 0.25, 1e-8);
}

TEST(ProbabilityTable, Header) {
  std::ostringstream out;
  write_probability_table(out, {{0.0, 1.0, 0, 1, {0.25, 0.25, 0.0, 0.1}}});
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "tau1,tau2,outcome_k,outcome_q,P_TO,P_Born,abs_dP");
}

TEST(ReductionMap, StaticRoundTripIsExact) {
  const ConstraintSpace space(ClockModel::periodic(1.0, 8), COperator::Zero(2, 2));
  EXPECT_LT(reduction_map_roundtrip(space, physical_state(space, 0.0, plus()), 0.7), 1e-10);
}

TEST(ReductionMap, InBandQubit) {
  const auto clock = ClockModel::periodic(2.0, 32);
  const ConstraintSpace space(clock, diag2(0.0, 9 * clock.level_spacing()));
  EXPECT_LT(reduction_map_roundtrip(space, physical_state(space, 0.0, plus()), 0.3), 1e-6);
  EXPECT_LT(reduction_propagator_defect(space, 2.1, 0.3), 1e-6);
}

TEST(Kuchar, OrthogonalTimesKillNaiveProbability) {
  const double energy = 2.0;
  const ConstraintSpace space(ClockModel::periodic(energy, 32), COperator::Zero(2, 2));
  const auto r = kuchar_demo(space, basis_vector(2, 0), plus(), 0.0, basis_vector(2, 0), kPi / energy);
  EXPECT_LT(std::abs(r.naive), 1e-12);
  EXPECT_NEAR(r.born_joint, 0.25, 1e-12);
  EXPECT_LT(r.clock_overlap, 1e-12);
  EXPECT_TRUE(r.mismatch);
}

TEST(Kuchar, EqualTimesSameState) {
  const ConstraintSpace space(ClockModel::periodic(2.0, 16), COperator::Zero(2, 2));
  const auto r = kuchar_demo(space, plus(), plus(), 0.5, plus(), 0.5);
  EXPECT_NEAR(r.born_conditional, 1.0, 1e-12);
  EXPECT_GT(r.naive, 0.0);
}

TEST(Kuchar, DynamicalSystemMismatchFlagged) {
  const auto clock = ClockModel::periodic(2.0, 32);
  const COperator h_s = clock.level_spacing() * 3 * pauli_x();
  const ConstraintSpace space(clock, h_s);
  const auto r = kuchar_demo(space, basis_vector(2, 0), basis_vector(2, 0), 0.0, basis_vector(2, 1),
                             clock.time_step());
  EXPECT_TRUE(r.mismatch);
}

TEST(ConditioningIdentity, TrivialOperators) {
  const ConstraintSpace space(ClockModel::periodic(2.0, 16), diag2(0.0, 0.5));
  EXPECT_LT(conditioning_identity_check(space, plus(), identity(2), 1.0, identity(2), 0.5, 2.0), 1e-8);
}

TEST(ConditioningIdentity, StaticQubitProjectors) {
  const ConstraintSpace space(ClockModel::periodic(2.0, 32), COperator::Zero(2, 2));
  EXPECT_LT(conditioning_identity_check(space, basis_vector(2, 0), projector(basis_vector(2, 0)), 1.0,
                                        projector(plus()), 0.0, 2.0),
            1e-4);
}

TEST(ConditioningIdentity, ImprovesWhenClockResolvesSpectrum) {
  // omega sits on the d = 64 level lattice but between d = 32 levels.
  const double energy = 2.0;
  const double omega = 3.0 * energy / 32.0;
  const auto check = [&](int d) {
    const ConstraintSpace space(ClockModel::periodic(energy, d), diag2(0.0, omega));
    return conditioning_identity_check(space, plus(), projector(basis_vector(2, 0)), 1.0, projector(plus()), 0.25,
                                       2.0);
  };
  const double coarse = check(32);
  const double fine = check(64);
  EXPECT_LT(fine, coarse);
  EXPECT_LT(fine, 1e-8);
}

TEST(PhysicalInnerProduct, HermitianAndPositive) {
  const ConstraintSpace space(ClockModel::periodic(1.0, 8), diag2(0.0, 0.25));
  const CVector a = physical_state(space, 0.0, plus());
  const CVector b = physical_state(space, 0.0, basis_vector(2, 1));
  EXPECT_GT(physical_inner_product(space, a, a).real(), 0.0);
  EXPECT_LT(std::abs(physical_inner_product(space, a, b) - std::conj(physical_inner_product(space, b, a))), 1e-12);
}
