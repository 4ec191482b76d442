#include "timeless/to_engine.hpp"

#include "timeless/csv.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace timeless {

namespace {

void require_finite_clock(const ClockModel& clock, const char* what) {
  if (!clock.finite()) throw std::invalid_argument(std::string(what) + ": finite clock required");
}

// Periodic trapezoid over [0, T]; exact for every frequency present in
// clock (x) system trajectories.
TimeGrid period_grid(const ConstraintSpace& space) {
  const ClockModel& clock = space.clock();
  double radius = 0.0;
  const RVector eig = hermitian_eigen(space.system_hamiltonian()).values;
  if (eig.size() > 0) radius = std::max(std::abs(eig.minCoeff()), std::abs(eig.maxCoeff()));
  const double harmonics = clock.dimension() * (clock.energy() + radius) / (2.0 * clock.energy());
  const auto intervals = static_cast<std::size_t>(2.0 * std::ceil(harmonics)) + 16;
  return TimeGrid(0.0, clock.period(), intervals + 1);
}

COperator outer(const CVector& v) { return v * v.adjoint(); }

}  // namespace

ConstraintSpace::ConstraintSpace(const ClockModel& clock, const COperator& h_s) : clock_(clock), h_s_(h_s) {
  require_finite_clock(clock, "ConstraintSpace");
  require_hermitian(h_s, 1e-10, "H_S");
  hamiltonian_ = kron(clock.hamiltonian(), identity(h_s.rows())) + kron(identity(clock.dimension()), h_s);
  eigen_ = hermitian_eigen(hamiltonian_);
  system_eigen_ = hermitian_eigen(h_s_);
  null_projector_ = COperator::Zero(dim(), dim());
  for (Eigen::Index i = 0; i < eigen_.values.size(); ++i) {
    if (std::abs(eigen_.values(i)) <= kNullTolerance) {
      null_projector_ += outer(eigen_.vectors.col(i));
      ++null_dimension_;
    }
  }
}

COperator ConstraintSpace::twirl(const COperator& op) const {
  if (op.rows() != dim() || op.cols() != dim()) throw DimensionError("twirl: operator dimension mismatch");
  const COperator& v = eigen_.vectors;
  COperator y = v.adjoint() * op * v;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      if (std::abs(eigen_.values(i) - eigen_.values(j)) > kDegeneracyTolerance) y(i, j) = 0.0;
    }
  }
  return static_cast<double>(clock_.dimension()) * (v * y * v.adjoint());
}

double ConstraintSpace::commutator_defect(const COperator& op) const {
  return max_abs(op * hamiltonian_ - hamiltonian_ * op);
}

double ConstraintSpace::constraint_residual(const CVector& v) const {
  const double n = v.norm();
  if (n == 0.0) throw std::invalid_argument("constraint_residual: zero vector");
  return (hamiltonian_ * v).norm() / n;
}

CVector ConstraintSpace::condition(const CVector& v, double t) const {
  const auto d = dims();
  return contract_factor(v, d, 0, clock_state(clock_, t));
}

COperator ConstraintSpace::system_propagator(double t) const {
  const auto& e = system_eigen_;
  CVector phases(e.values.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::exp(-kI * e.values(i) * t);
  return e.vectors * phases.asDiagonal() * e.vectors.adjoint();
}

double ConstraintSpace::clock_quality() const {
  const RVector& e = system_eigen_.values;
  return (e.maxCoeff() - e.minCoeff()) / (2.0 * clock_.energy());
}

HistoryState free_history_state(const ClockModel& clock, const COperator& h_s, const CVector& psi0) {
  const ConstraintSpace space(clock, h_s);
  if (psi0.size() != h_s.rows()) throw DimensionError("free_history_state: psi0 dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw std::invalid_argument("free_history_state: psi0 must be normalized");

  const TimeGrid grid = period_grid(space);
  CVector raw = CVector::Zero(space.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = clock.normalization() * grid.weight(i);
    raw += w * kron(clock_state(clock, grid[i]), CVector(space.system_propagator(grid[i]) * psi0));
  }

  HistoryState out{raw, clock, space.dims()};
  out.residual = space.constraint_residual(raw);
  out.scale = raw.norm();
  out.vector = raw / out.scale;
  const double conditioning_defect = (space.condition(raw, 0.0) - psi0).norm();
  out.resonant = out.residual < 1e-8 && conditioning_defect < 1e-8;
  return out;
}

TwirledOperator twirl(const ConstraintSpace& space, const COperator& f_s, double tau, const std::string& label) {
  if (f_s.rows() != space.system_dim() || f_s.cols() != space.system_dim()) {
    throw DimensionError("twirl: system operator dimension mismatch");
  }
  const COperator local = kron(outer(clock_state(space.clock(), tau)), f_s);
  return {space.twirl(local), label, tau};
}

TwirledOperator twirl(const ClockModel& clock, const COperator& h_s, const COperator& f_s, double tau) {
  return twirl(ConstraintSpace(clock, h_s), f_s, tau);
}

CVector physical_state(const ConstraintSpace& space, double t, const CVector& psi_t) {
  if (psi_t.size() != space.system_dim()) throw DimensionError("physical_state: state dimension mismatch");
  const CVector local = kron(clock_state(space.clock(), t), psi_t);
  return static_cast<double>(space.clock().dimension()) * (space.null_projector() * local);
}

Complex physical_inner_product(const ConstraintSpace& space, const CVector& a, const CVector& b) {
  return a.dot(space.null_projector() * b);
}

TwoTimeProbability two_time_probability_TO(const ConstraintSpace& space, const CVector& psi0,
                                           const COperator& pi_k, double tau1, const COperator& pi_q,
                                           double tau2) {
  const CVector psi = physical_state(space, 0.0, psi0);
  const double norm2 = psi.squaredNorm();
  if (norm2 < 1e-20) throw std::invalid_argument("two_time_probability_TO: psi0 has no physical component");
  const COperator first = twirl(space, pi_k, tau1, "Pi_k").matrix;
  const COperator second = twirl(space, pi_q, tau2, "Pi_q").matrix;

  TwoTimeProbability out;
  out.p_to = (second * (first * psi)).squaredNorm() / norm2;
  const CVector born = pi_q * space.system_propagator(tau2 - tau1) * pi_k * space.system_propagator(tau1) * psi0;
  out.p_born = born.squaredNorm();
  out.deviation = std::abs(out.p_to - out.p_born);
  out.clock_quality = space.clock_quality();
  return out;
}

TwoTimeProbability two_time_probability_TO(const ClockModel& clock, const COperator& h_s, const CVector& psi0,
                                           const COperator& pi_k, double tau1, const COperator& pi_q,
                                           double tau2) {
  return two_time_probability_TO(ConstraintSpace(clock, h_s), psi0, pi_k, tau1, pi_q, tau2);
}

void write_probability_table(std::ostream& out, const std::vector<ProbabilityRow>& rows) {
  out << "tau1,tau2,outcome_k,outcome_q,P_TO,P_Born,abs_dP\n";
  for (const auto& r : rows) {
    out << csv::num(r.tau1) << ',' << csv::num(r.tau2) << ',' << r.outcome_k << ',' << r.outcome_q << ','
        << csv::num(r.value.p_to) << ',' << csv::num(r.value.p_born) << ',' << csv::num(r.value.deviation) << '\n';
  }
}

namespace {

CVector reduction_inverse(const ConstraintSpace& space, const TimeGrid& grid, const CVector& chi, double tau) {
  CVector out = CVector::Zero(space.dim());
  const double nc = space.clock().normalization();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const CVector evolved = space.system_propagator(grid[i] - tau) * chi;
    out += nc * grid.weight(i) * kron(clock_state(space.clock(), grid[i]), evolved);
  }
  return out;
}

}  // namespace

double reduction_map_roundtrip(const ConstraintSpace& space, const CVector& psi, double tau) {
  if (psi.size() != space.dim()) throw DimensionError("reduction_map_roundtrip: history dimension mismatch");
  const double n = psi.norm();
  if (n == 0.0) throw std::invalid_argument("reduction_map_roundtrip: zero history state");
  const CVector back = reduction_inverse(space, period_grid(space), space.condition(psi, tau), tau);
  return (back - psi).norm() / n;
}

double reduction_propagator_defect(const ConstraintSpace& space, double tau_prime, double tau) {
  const TimeGrid grid = period_grid(space);
  const COperator target = space.system_propagator(tau_prime - tau);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < space.system_dim(); ++j) {
    const CVector e = basis_vector(space.system_dim(), j);
    const CVector got = space.condition(reduction_inverse(space, grid, e, tau), tau_prime);
    worst = std::max(worst, (got - target * e).norm());
  }
  return worst;
}

KucharReport kuchar_demo(const ConstraintSpace& space, const CVector& psi0, const CVector& a, double tau,
                         const CVector& b, double tau_prime) {
  const CVector psi = physical_state(space, 0.0, psi0);
  const COperator first = kron(outer(clock_state(space.clock(), tau)), outer(a.normalized()));
  const COperator second = kron(outer(clock_state(space.clock(), tau_prime)), outer(b.normalized()));
  const CVector after_first = first * psi;
  const CVector after_second = second * after_first;

  KucharReport r;
  const double n1 = after_first.squaredNorm();
  r.naive = n1 > 0.0 ? after_second.squaredNorm() / n1 : 0.0;
  const double transition = std::norm(b.normalized().dot(space.system_propagator(tau_prime - tau) * a.normalized()));
  r.born_conditional = transition;
  r.born_joint = transition * std::norm(a.normalized().dot(space.system_propagator(tau) * psi0));
  r.clock_overlap = std::norm(clock_state(space.clock(), tau_prime).dot(clock_state(space.clock(), tau)));
  r.mismatch = std::abs(r.naive - r.born_conditional) > 1e-6;
  return r;
}

double kuchar_naive_two_time(const ConstraintSpace& space, const CVector& psi0, const CVector& a, double tau,
                             const CVector& b, double tau_prime) {
  return kuchar_demo(space, psi0, a, tau, b, tau_prime).naive;
}

double conditioning_identity_check(const ConstraintSpace& space, const CVector& psi0, const COperator& f_s,
                                   double tau2, const COperator& g_s, double tau1, double t) {
  if (!(t >= tau2 && tau2 >= tau1)) throw std::invalid_argument("conditioning_identity_check: need t >= tau2 >= tau1");
  const CVector history = free_history_state(space.clock(), space.system_hamiltonian(), psi0).unnormalized();
  const COperator f = twirl(space, f_s, tau2).matrix;
  const COperator g = twirl(space, g_s, tau1).matrix;
  const CVector lhs = space.condition(f * (g * history), t);
  const CVector rhs = space.system_propagator(t - tau2) * f_s * space.system_propagator(tau2 - tau1) * g_s *
                      space.system_propagator(tau1) * psi0;
  return (lhs - rhs).norm();
}

}  // namespace timeless
