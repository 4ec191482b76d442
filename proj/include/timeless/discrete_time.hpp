#pragma once

// Discrete-time purified measurements on the orthogonal clock lattice
// t_k = t_0 + k pi / E: psi(t_{k+1}) = U^(k) psi(t_k).

#include "timeless/pm_engine.hpp"

#include <random>
#include <vector>

namespace timeless {

enum class Boundary { OpenLine, Periodic };

struct DiscreteEvolution {
  std::vector<COperator> steps;  // U^(0), ..., U^(K-1)
  Boundary boundary = Boundary::OpenLine;

  /// Throws unless every step is a unitary of one common dimension.
  void validate() const;
  Eigen::Index dim() const { return steps.empty() ? 0 : steps.front().rows(); }
};

struct DiscreteSolution {
  /// OpenLine: K + 1 states psi(t_0..t_K).  Periodic: K states around the cycle.
  std::vector<CVector> states;
  double fixed_point_residual = 0.0;  // ||M psi(t_0) - psi(t_0)||, periodic only
  double eigen_distance = 0.0;        // min |lambda - 1| over monodromy eigenvalues
  bool used_eigenvector = false;
};

/// Ordered product U^(K-1) ... U^(0).
COperator monodromy(const DiscreteEvolution& evo);

/// Periodic runs whose psi_t0 is not a fixed point fall back to the
/// monodromy eigenvector closest to eigenvalue 1 (phase-aligned to psi_t0).
DiscreteSolution discrete_solve(const DiscreteEvolution& evo, const CVector& psi_t0);

struct ConstraintResidual {
  double steps = 0.0;
  double wraparound = 0.0;
  double total() const { return std::max(steps, wraparound); }
};

ConstraintResidual discrete_constraint_residual(const DiscreteEvolution& evo, const std::vector<CVector>& history);

/// Steps on the lattice t_k = t0 + k pi/E: U^(k) = V_(k+1) e^{-i (pi/E) H_S}, where V_(k+1) is
/// the product of the event unitaries sitting at t_{k+1}.  Events must lie on the lattice.
DiscreteEvolution lattice_evolution(const COperator& h_s, const std::vector<Eigen::Index>& ancilla_dims,
                                    const std::vector<PurifiedEvent>& events, double energy, double t0,
                                    std::size_t count);

/// Haar-random unitary from the QR decomposition of a complex Gaussian matrix.
COperator haar_unitary(Eigen::Index dim, std::mt19937_64& rng);

}  // namespace timeless
