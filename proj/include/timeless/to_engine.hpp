#pragma once

// Twirled observables on clock (x) system, where "system" is whatever sits
// to the right of the clock (it may already include ancillas).

#include "timeless/clock.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace timeless {

/// Eigendata of the free constraint H = H_C (x) 1 + 1 (x) H_S on a finite clock.
class ConstraintSpace {
 public:
  static constexpr double kNullTolerance = 1e-9;
  static constexpr double kDegeneracyTolerance = 1e-9;

  ConstraintSpace(const ClockModel& clock, const COperator& h_s);

  const ClockModel& clock() const { return clock_; }
  const COperator& system_hamiltonian() const { return h_s_; }
  Eigen::Index system_dim() const { return h_s_.rows(); }
  Eigen::Index dim() const { return hamiltonian_.rows(); }
  std::vector<Eigen::Index> dims() const { return {clock_.dimension(), system_dim()}; }
  const COperator& hamiltonian() const { return hamiltonian_; }
  const HermitianEigen& eigen() const { return eigen_; }

  /// Projector onto the null space of H (group averaging).
  const COperator& null_projector() const { return null_projector_; }
  Eigen::Index null_dimension() const { return null_dimension_; }

  /// d times the exact time average of e^{-itH} op e^{itH}, so that the
  /// twirl of |phi_tau><phi_tau| (x) 1 is the identity.
  COperator twirl(const COperator& op) const;

  /// ||[op, H]||_max
  double commutator_defect(const COperator& op) const;
  /// ||H v|| / ||v||
  double constraint_residual(const CVector& v) const;

  /// (<phi_t| (x) 1) v
  CVector condition(const CVector& v, double t) const;
  /// e^{-i t H_S}
  COperator system_propagator(double t) const;

  /// Spread of the H_S spectrum relative to the clock bandwidth 2E.  Small
  /// values mean the clock resolves the system dynamics well.
  double clock_quality() const;

 private:
  ClockModel clock_;
  COperator h_s_;
  COperator hamiltonian_;
  HermitianEigen eigen_;
  HermitianEigen system_eigen_;
  COperator null_projector_;
  Eigen::Index null_dimension_ = 0;
};

struct HistoryState {
  CVector vector;  // unit norm
  ClockModel clock;
  std::vector<Eigen::Index> dims;
  /// ||H vector||; large values mean the system spectrum is off the clock lattice.
  double residual = 0.0;
  bool resonant = false;
  /// scale * <phi_0|vector> reproduces psi0 when resonant.
  double scale = 1.0;

  CVector unnormalized() const { return scale * vector; }
};

struct TwirledOperator {
  COperator matrix;
  std::string label;
  double tau = 0.0;
};

/// sum_i w_i |phi_{t_i}> (x) e^{-i t_i H_S} psi0 over one clock period.
HistoryState free_history_state(const ClockModel& clock, const COperator& h_s, const CVector& psi0);

TwirledOperator twirl(const ConstraintSpace& space, const COperator& f_s, double tau,
                      const std::string& label = "F");
TwirledOperator twirl(const ClockModel& clock, const COperator& h_s, const COperator& f_s, double tau);

/// Physical state built by conditioning at clock time t on system state psi_t.
CVector physical_state(const ConstraintSpace& space, double t, const CVector& psi_t);
Complex physical_inner_product(const ConstraintSpace& space, const CVector& a, const CVector& b);

struct TwoTimeProbability {
  double p_to = 0.0;
  double p_born = 0.0;
  double deviation = 0.0;
  double clock_quality = 0.0;
};

/// Joint probability of Pi_k at tau1 then Pi_q at tau2 from twirled
/// projectors acting on the physical history state, with the Born value
/// ||Pi_q e^{-i(tau2-tau1)H_S} Pi_k e^{-i tau1 H_S} psi0||^2 alongside.
TwoTimeProbability two_time_probability_TO(const ConstraintSpace& space, const CVector& psi0,
                                           const COperator& pi_k, double tau1, const COperator& pi_q,
                                           double tau2);
TwoTimeProbability two_time_probability_TO(const ClockModel& clock, const COperator& h_s, const CVector& psi0,
                                           const COperator& pi_k, double tau1, const COperator& pi_q,
                                           double tau2);

struct ProbabilityRow {
  double tau1;
  double tau2;
  int outcome_k;
  int outcome_q;
  TwoTimeProbability value;
};
void write_probability_table(std::ostream& out, const std::vector<ProbabilityRow>& rows);

/// ||R^{-1}(tau) R(tau) psi - psi|| / ||psi|| with R(tau) = <phi_tau| and
/// R^{-1}(tau) = N_C sum_i w_i |phi_{t_i}> e^{-i(t_i - tau)H_S} over one period.
double reduction_map_roundtrip(const ConstraintSpace& space, const CVector& psi, double tau);
/// max over basis inputs of ||R(tau') R^{-1}(tau) e_j - e^{-i(tau'-tau)H_S} e_j||.
double reduction_propagator_defect(const ConstraintSpace& space, double tau_prime, double tau);

struct KucharReport {
  double naive = 0.0;             // double conditioning on |phi_tau>|a> then |phi_tau'>|b>
  double born_joint = 0.0;        // |<b|U(tau'-tau)|a>|^2 |<a|U(tau)psi0>|^2
  double born_conditional = 0.0;  // |<b|U(tau'-tau)|a>|^2
  double clock_overlap = 0.0;     // |<phi_tau'|phi_tau>|^2
  bool mismatch = false;
};

KucharReport kuchar_demo(const ConstraintSpace& space, const CVector& psi0, const CVector& a, double tau,
                         const CVector& b, double tau_prime);
double kuchar_naive_two_time(const ConstraintSpace& space, const CVector& psi0, const CVector& a, double tau,
                             const CVector& b, double tau_prime);

/// ||<phi_t| F(tau2) G(tau1) |Psi> - e^{-iH_S(t-tau2)} F e^{-iH_S(tau2-tau1)} G e^{-iH_S tau1} psi0||
double conditioning_identity_check(const ConstraintSpace& space, const CVector& psi0, const COperator& f_s,
                                   double tau2, const COperator& g_s, double tau1, double t);

}  // namespace timeless
