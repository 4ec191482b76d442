#include "timeless/discrete_time.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace timeless {

void DiscreteEvolution::validate() const {
  if (steps.empty()) throw std::invalid_argument("DiscreteEvolution: no steps");
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (steps[k].rows() != dim() || steps[k].cols() != dim()) {
      throw DimensionError("DiscreteEvolution: step " + std::to_string(k) + " has the wrong shape");
    }
    if (!is_unitary(steps[k])) throw std::invalid_argument("DiscreteEvolution: step " + std::to_string(k) + " is not unitary");
  }
}

COperator monodromy(const DiscreteEvolution& evo) {
  evo.validate();
  COperator m = identity(evo.dim());
  for (const auto& u : evo.steps) m = u * m;
  return m;
}

DiscreteSolution discrete_solve(const DiscreteEvolution& evo, const CVector& psi_t0) {
  evo.validate();
  if (psi_t0.size() != evo.dim()) throw DimensionError("discrete_solve: state dimension mismatch");
  if (std::abs(psi_t0.norm() - 1.0) > 1e-10) throw std::invalid_argument("discrete_solve: psi_t0 must be normalized");

  DiscreteSolution out;
  CVector start = psi_t0;
  if (evo.boundary == Boundary::Periodic) {
    const COperator m = monodromy(evo);
    out.fixed_point_residual = (m * start - start).norm();
    const Eigen::ComplexEigenSolver<COperator> solver(m);
    const auto& values = solver.eigenvalues();
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < values.size(); ++i) {
      if (std::abs(values(i) - 1.0) < std::abs(values(best) - 1.0)) best = i;
    }
    out.eigen_distance = std::abs(values(best) - 1.0);
    if (out.fixed_point_residual > 1e-10) {
      CVector v = solver.eigenvectors().col(best).normalized();
      const Complex overlap = v.dot(psi_t0);
      if (std::abs(overlap) > 0.0) v *= overlap / std::abs(overlap);
      start = v;
      out.used_eigenvector = true;
      out.fixed_point_residual = (m * start - start).norm();
    }
  }

  out.states.push_back(start);
  const std::size_t produced = evo.boundary == Boundary::OpenLine ? evo.steps.size() : evo.steps.size() - 1;
  for (std::size_t k = 0; k < produced; ++k) out.states.push_back(evo.steps[k] * out.states.back());
  return out;
}

ConstraintResidual discrete_constraint_residual(const DiscreteEvolution& evo, const std::vector<CVector>& history) {
  evo.validate();
  const std::size_t k_steps = evo.steps.size();
  const std::size_t expected = evo.boundary == Boundary::OpenLine ? k_steps + 1 : k_steps;
  if (history.size() != expected) throw DimensionError("discrete_constraint_residual: history length mismatch");
  ConstraintResidual r;
  for (std::size_t k = 0; k + 1 < history.size(); ++k) {
    r.steps = std::max(r.steps, (history[k + 1] - evo.steps[k] * history[k]).norm());
  }
  if (evo.boundary == Boundary::Periodic) {
    r.wraparound = (history.front() - evo.steps.back() * history.back()).norm();
  }
  return r;
}

DiscreteEvolution lattice_evolution(const COperator& h_s, const std::vector<Eigen::Index>& ancilla_dims,
                                    const std::vector<PurifiedEvent>& events, double energy, double t0,
                                    std::size_t count) {
  if (!(energy > 0.0)) throw std::invalid_argument("lattice_evolution: E must be positive");
  require_hermitian(h_s, 1e-10, "H_S");
  std::vector<Eigen::Index> dims{h_s.rows()};
  dims.insert(dims.end(), ancilla_dims.begin(), ancilla_dims.end());
  const Eigen::Index dim = product(dims);
  const double step = std::numbers::pi / energy;
  const COperator free = expm_hermitian_generator(kron(h_s, identity(dim / h_s.rows())), step);

  std::vector<COperator> kicks(count, identity(dim));
  auto sorted = events;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
  for (const auto& ev : sorted) {
    const double x = (ev.time - t0) / step;
    const double k = std::round(x);
    if (std::abs(x - k) > 1e-9 || k < 1.0 || k > static_cast<double>(count)) {
      throw std::invalid_argument("lattice_evolution: event is not on a lattice point inside the window");
    }
    if (ev.ancilla >= ancilla_dims.size()) throw DimensionError("lattice_evolution: no such ancilla");
    const std::size_t targets[] = {0, ev.ancilla + 1};
    auto& kick = kicks[static_cast<std::size_t>(k) - 1];
    kick = embed(ev.unitary, dims, targets) * kick;
  }
  DiscreteEvolution evo;
  for (std::size_t k = 0; k < count; ++k) evo.steps.push_back(kicks[k] * free);
  return evo;
}

COperator haar_unitary(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  COperator z(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) z(r, c) = Complex(normal(rng), normal(rng));
  }
  const Eigen::HouseholderQR<COperator> qr(z);
  COperator q = qr.householderQ();
  const COperator r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Complex d = r(i, i);
    if (std::abs(d) > 0.0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

}  // namespace timeless
