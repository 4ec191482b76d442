#pragma once

// Purified measurements: ideal-clock piecewise-unitary histories, the Born
// series for the time-non-local evolution, and checks on its solutions.

#include "timeless/kernels.hpp"
#include "timeless/measurement.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace timeless {

/// Quadrature form of a series solution:
///   psi(t) = psi0 - i sum_j w_j F(t, t_j) K_j psi_j.
struct SolutionRepresentation {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<COperator> couplings;
  std::vector<CVector> node_states;
  CVector psi0;
};

struct Trajectory {
  TimeGrid grid;
  std::vector<CVector> states;
  StepKernel kernel;
  std::vector<Eigen::Index> factor_dims;  // system, ancilla_1, ...
  COperator free_hamiltonian;             // on system (x) ancillas
  std::optional<ClockModel> periodic_clock{};
  std::optional<InteractionSchedule> schedule{};
  std::optional<SolutionRepresentation> representation{};
  /// Exact evaluator, set by solvers that have a closed form.
  std::function<CVector(double)> evaluator{};

  /// psi(t) from the evaluator, the representation, or linear interpolation
  /// on the grid (constant beyond its ends), in that order of preference.
  CVector at(double t) const;
  std::size_t size() const { return states.size(); }
  double max_norm_deviation() const;
};

struct BornSeriesReport {
  int orders_used = 0;
  std::vector<double> term_norms;  // max over grid and nodes, order 1, 2, ...
  bool converged = false;
  double residual = 0.0;
  std::vector<double> ratios() const;
};

struct BornOptions {
  double tolerance = 1e-8;
  int max_order = 40;
  /// Quadrature node spacing on window supports; 0 picks 0.01/E (1e-3 ideal).
  double node_spacing = 0.0;
  bool parallel = true;
};

class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Measurement event for the ideal clock: unitary V on system (x) ancilla_i.
struct PurifiedEvent {
  double time;
  COperator unitary;
  std::size_t ancilla;
};

/// Free evolution interleaved with the event unitaries (applied for t >= tau).
/// psi0 is the system (x) ancillas state at t = 0.
Trajectory pm_ideal_history(const COperator& h_s, const std::vector<Eigen::Index>& ancilla_dims,
                            std::vector<PurifiedEvent> events, const CVector& psi0, const TimeGrid& grid);

/// Time-ordered exponential of a schedule without delta terms (F = Theta).
/// psi0 is the state before every window; the free Hamiltonian must vanish.
Trajectory ideal_schedule_solve(const InteractionSchedule& schedule, const CVector& psi0, const TimeGrid& grid);

/// Born series with kernel F (band-limited or ideal).  The free Hamiltonian
/// must be zero; psi0 is the state before every window.
std::pair<Trajectory, BornSeriesReport> born_series_solve(const StepKernel& kernel,
                                                          const InteractionSchedule& schedule,
                                                          const CVector& psi0, const TimeGrid& grid,
                                                          const BornOptions& options = {});
std::pair<Trajectory, BornSeriesReport> born_series_solve(const ClockModel& clock,
                                                          const InteractionSchedule& schedule,
                                                          const CVector& psi0, const TimeGrid& grid,
                                                          const BornOptions& options = {});

/// Direct evaluation of every series term with no precomputed tables.
std::pair<Trajectory, BornSeriesReport> born_series_solve_reference(const StepKernel& kernel,
                                                                    const InteractionSchedule& schedule,
                                                                    const CVector& psi0, const TimeGrid& grid,
                                                                    const BornOptions& options = {});

/// Grid for a schedule: hull plus margin 4 pi / E on both sides, spacing <= max_spacing.
TimeGrid trajectory_grid(const InteractionSchedule& schedule, double energy, double max_spacing);

/// max over interior grid points of ||i dpsi/dt - H_S psi - sum_j w_j f(t - t_j) K_j psi(t_j)||.
double evolution_residual(const Trajectory& trajectory);

/// max over sample times of ||sum_j w_j f(t - t_j) psi(t_j) - psi(t)||.
double history_roundtrip_check(const Trajectory& trajectory, int samples = 41);

struct PMProbability {
  double probability;
  double denominator;
};

class UnreachableTimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Probability of outcome `outcome` on ancilla `ancilla` at clock time t.
PMProbability pm_probability(const Trajectory& trajectory, std::size_t ancilla, Eigen::Index outcome, double t);
/// Joint probability of several (ancilla, outcome) pairs at clock time t.
PMProbability pm_probability(const Trajectory& trajectory,
                             const std::vector<std::pair<std::size_t, Eigen::Index>>& outcomes, double t);
/// ||psi(t_i)||^2 on the trajectory grid.
std::vector<double> denominator_curve(const Trajectory& trajectory);

struct DeltaKickValidation {
  double series_defect = 0.0;
  double spectral_radius = 0.0;
  int terms = 0;
};

class SeriesDivergenceError : public std::domain_error {
 public:
  SeriesDivergenceError(const std::string& what, double radius) : std::domain_error(what), radius_(radius) {}
  double spectral_radius() const { return radius_; }

 private:
  double radius_;
};

/// 1 + 2F sum_{N=1}^{terms} (-i/2)^N K^N
COperator delta_kick_series(const COperator& k, double f_value, int terms = 50);
/// M(F) = 1 - i F K (1 + iK/2)^{-1}; at F = 1 this is (2 - iK)(2 + iK)^{-1}.
/// The closed form is checked against the 50-term series before it is returned.
COperator delta_kick_closed_form(const COperator& k, double f_value, DeltaKickValidation* validation = nullptr);

struct PeriodicSolution {
  Trajectory trajectory;
  BornSeriesReport report;
  double periodicity_residual = 0.0;
};

/// F_tau(t) = N_C int_0^t <phi_s|phi_tau> ds on a periodic clock.
Complex periodic_kernel(const ClockModel& clock, double t, double tau);

/// Born series on [0, T] with the kernels F_tau; the residual is
/// ||psi(0) - N_C int_0^T <phi_0|phi_tau> psi(tau) dtau||.
PeriodicSolution periodic_pm_solve(const ClockModel& clock, const InteractionSchedule& schedule,
                                   const CVector& psi0, const BornOptions& options = {},
                                   double output_spacing = 0.0);

struct TranslationResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double t = 0.0;  // lattice time actually used
};

using TrajectorySolver = std::function<Trajectory(const CVector& psi0)>;

/// Compares the PM probability with the quotient of twirled sandwiched
/// operators against |eta><eta|.  The PM history is represented on the
/// d-point orthogonal lattice ending at t (t is snapped to that lattice).
TranslationResult pm_to_translation_check(double energy, int dimension, const TrajectorySolver& solve,
                                          const CVector& psi0, std::size_t ancilla, Eigen::Index outcome,
                                          double t);

}  // namespace timeless
