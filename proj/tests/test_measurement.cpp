#include "timeless/measurement.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace timeless;
using namespace timeless::test;

TEST(KrausSet, RejectsIncompleteFamily) {
  EXPECT_THROW(KrausSet({0.5 * identity(2)}), KrausCompletenessError);
  try {
    KrausSet({projector(basis_vector(2, 0))});
  } catch (const KrausCompletenessError& e) {
    EXPECT_NEAR(e.residual(), 1.0, 1e-15);
  }
}

TEST(KrausSet, ProjectiveFamilyFromBasis) {
  const auto k = KrausSet::projective(hadamard());
  EXPECT_EQ(k.ancilla_dim(), 2);
  EXPECT_LT(max_abs(k.operators()[0] - projector(plus())), 1e-15);
  EXPECT_THROW(KrausSet::projective(2.0 * identity(2)), std::invalid_argument);
}

TEST(Purification, CopiesComputationalBasis) {
  const COperator v = purification_unitary(KrausSet::computational_basis(2));
  EXPECT_LT((v * kron(basis_vector(2, 0), basis_vector(2, 0)) - kron(basis_vector(2, 0), basis_vector(2, 0))).norm(), 1e-15);
  EXPECT_LT((v * kron(basis_vector(2, 1), basis_vector(2, 0)) - kron(basis_vector(2, 1), basis_vector(2, 1))).norm(), 1e-15);
  EXPECT_TRUE(is_unitary(v));
}

TEST(Purification, TrivialFamilyIsIdentityOnReadySector) {
  const COperator v = purification_unitary(KrausSet({identity(3)}));
  EXPECT_LT(max_abs(v - identity(3)), 1e-15);
}

TEST(Purification, RandomRankTwoPairIsUnitary) {
  std::mt19937_64 rng(21);
  // K_a = M_a S^{-1/2} with S = sum M_a^dagger M_a makes a complete pair.
  std::normal_distribution<double> n;
  std::vector<COperator> m(2, COperator(2, 2));
  for (auto& x : m)
    for (Eigen::Index i = 0; i < 4; ++i) x(i / 2, i % 2) = Complex(n(rng), n(rng));
  const COperator s = m[0].adjoint() * m[0] + m[1].adjoint() * m[1];
  const auto eig = hermitian_eigen(s);
  const COperator s_inv_half = eig.vectors * eig.values.cwiseInverse().cwiseSqrt().asDiagonal() * eig.vectors.adjoint();
  const KrausSet kraus({m[0] * s_inv_half, m[1] * s_inv_half});
  const COperator v = purification_unitary(kraus);
  EXPECT_LT(max_abs(v.adjoint() * v - identity(4)), 1e-10);
  const CVector psi = random_state(2, rng);
  const CVector out = v * kron(psi, basis_vector(2, 0));
  for (Eigen::Index a = 0; a < 2; ++a) {
    const std::vector<Eigen::Index> dims{2, 2};
    const CVector branch = contract_factor(out, dims, 1, basis_vector(2, a));
    EXPECT_LT((branch - kraus.operators()[a] * psi).norm(), 1e-12);
  }
}

TEST(Window, IndicatorEdges) {
  const auto w = WindowFunction::indicator(0.0, 1.0);
  EXPECT_EQ(w(0.0), 1.0);
  EXPECT_EQ(w(1.0), 0.0);
  EXPECT_EQ(w.interior_value(1.0), 1.0);
  EXPECT_EQ(w(-1e-12), 0.0);
  EXPECT_THROW(WindowFunction::indicator(1.0, 1.0), std::invalid_argument);
  EXPECT_DOUBLE_EQ(WindowFunction::unit_indicator(0.0, 4.0).normalization(), 1.0);
}

TEST(Window, GaussianIsNormalized) {
  const auto w = WindowFunction::gaussian(0.3, 0.2, 2.0);
  double sum = 0.0;
  const double h = 1e-4;
  for (double x = -3.0; x < 3.0; x += h) sum += w(x) * h;
  EXPECT_NEAR(sum, 2.0, 1e-6);
  const auto [lo, hi] = w.support();
  EXPECT_NEAR(hi - lo, 16 * 0.2, 1e-15);
}

TEST(Window, DeltaHasNoPointwiseValue) {
  const auto w = WindowFunction::delta(0.5, 2.0);
  EXPECT_THROW(w(0.5), std::logic_error);
  EXPECT_DOUBLE_EQ(w.normalization(), 2.0);
}

TEST(Schedule, EmptyScheduleIsFreeHamiltonian) {
  const InteractionSchedule s(2, {});
  EXPECT_EQ(max_abs(s.coupling_at(0.7)), 0.0);
}

TEST(Schedule, OutsideSupportOnlyFreePart) {
  InteractionSchedule s(2, {2}, 0.3 * pauli_z());
  s.add_term(WindowFunction::indicator(0.0, 1.0), 0.0, kron(pauli_x(), pauli_x()));
  EXPECT_LT(max_abs(s.coupling_at(2.0) - kron(0.3 * pauli_z(), identity(2))), 1e-15);
}

TEST(Schedule, TwoTermsInsideFirstWindow) {
  InteractionSchedule s(2, {});
  s.add_term(WindowFunction::indicator(0.0, 1.0), 0.0, pauli_x());
  s.add_term(WindowFunction::indicator(0.0, 1.0), 3.0, pauli_z());
  EXPECT_LT(max_abs(s.coupling_at(0.5) - pauli_x()), 1e-15);
  EXPECT_TRUE(s.windows_disjoint());
  EXPECT_NEAR(s.support_hull().second, 4.0, 1e-15);
}

TEST(Schedule, ValidatesCouplings) {
  InteractionSchedule s(2, {2});
  EXPECT_THROW(s.add_term(WindowFunction::indicator(0, 1), 0.0, pauli_x()), DimensionError);
  COperator bad = kron(pauli_x(), identity(2));
  bad(0, 1) += 1.0;
  EXPECT_THROW(s.add_term(WindowFunction::indicator(0, 1), 0.0, bad), NotHermitianError);
  s.add_term(WindowFunction::delta(), 0.0, kron(pauli_x(), identity(2)));
  EXPECT_THROW(s.coupling_at(0.0), std::invalid_argument);
}

TEST(Schedule, OverlapDetection) {
  InteractionSchedule s(2, {});
  s.add_term(WindowFunction::indicator(0.0, 1.0), 0.0, pauli_x());
  s.add_term(WindowFunction::indicator(0.0, 1.0), 0.5, pauli_x());
  EXPECT_FALSE(s.windows_disjoint());
}

TEST(Schedule, ReadyState) {
  const InteractionSchedule s(2, {3, 2});
  const CVector r = s.ready_state(plus());
  EXPECT_EQ(r.size(), 12);
  EXPECT_NEAR(std::abs(r(0)), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(std::abs(r(6)), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(KrausProbabilities, BornRule) {
  const auto p = kraus_probabilities(KrausSet::computational_basis(2), plus());
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
}
