#pragma once

// Measurement couplings: Kraus sets, their purification unitary on
// system (x) ancilla, and clock-conditioned interaction schedules K(t).

#include "timeless/tensor.hpp"

#include <utility>
#include <vector>

namespace timeless {

class KrausCompletenessError : public std::invalid_argument {
 public:
  KrausCompletenessError(const std::string& what, double residual)
      : std::invalid_argument(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Kraus operators {K^a} with sum_a K^a^dagger K^a = 1 (to 1e-10).  The
/// ancilla that purifies them has one level per operator.
class KrausSet {
 public:
  explicit KrausSet(std::vector<COperator> operators);

  /// Projective measurement in the computational basis of a d-level system.
  static KrausSet computational_basis(Eigen::Index dim);
  /// Projective measurement onto the columns of a unitary `basis`.
  static KrausSet projective(const COperator& basis);

  const std::vector<COperator>& operators() const { return operators_; }
  Eigen::Index system_dim() const { return operators_.front().rows(); }
  Eigen::Index ancilla_dim() const { return static_cast<Eigen::Index>(operators_.size()); }
  double completeness_residual() const;

 private:
  std::vector<COperator> operators_;
};

/// V on system (x) ancilla with V (psi (x) |r>) = sum_a K^a psi (x) |a>, where
/// |r> is ancilla level 0.  Columns outside the |r> sector are completed by
/// Gram-Schmidt over the standard basis, taken in index order.
COperator purification_unitary(const KrausSet& kraus);

enum class WindowKind { Indicator, Delta, Gaussian };

/// Window shape k(x) in coordinates relative to the event centre.
class WindowFunction {
 public:
  /// height * chi_[a, b)(x); the raw indicator has height 1.
  static WindowFunction indicator(double a, double b, double height = 1.0);
  /// Indicator scaled to unit integral.
  static WindowFunction unit_indicator(double a, double b);
  static WindowFunction delta(double offset = 0.0, double weight = 1.0);
  /// Normalized Gaussian times `normalization`, truncated at 8 sigma.
  static WindowFunction gaussian(double offset, double sigma, double normalization = 1.0);

  WindowKind kind() const { return kind_; }
  /// Closed on the left, open on the right.  Throws for delta windows.
  double operator()(double x) const;
  /// Value inside the support for quadrature that treats the edges as nodes.
  double interior_value(double x) const;
  std::pair<double, double> support() const;
  double normalization() const;

  double a() const { return a_; }
  double b() const { return b_; }
  double scale() const { return scale_; }
  double offset() const { return a_; }
  double sigma() const { return b_; }

 private:
  WindowFunction(WindowKind kind, double a, double b, double scale) : kind_(kind), a_(a), b_(b), scale_(scale) {}
  WindowKind kind_;
  double a_;      // indicator: left edge; delta/gaussian: offset
  double b_;      // indicator: right edge; gaussian: sigma
  double scale_;  // indicator height, delta weight, gaussian normalization
};

struct ScheduleTerm {
  WindowFunction window;
  double center;
  COperator coupling;  // Hermitian, on system (x) ancillas
};

/// K(t) = H_S (x) 1 + sum_i k_i(t - tau_i) K_i on system (x) ancilla_1 (x) ...
class InteractionSchedule {
 public:
  InteractionSchedule(Eigen::Index system_dim, std::vector<Eigen::Index> ancilla_dims);
  InteractionSchedule(Eigen::Index system_dim, std::vector<Eigen::Index> ancilla_dims,
                      COperator free_hamiltonian);

  void add_term(const WindowFunction& window, double center, const COperator& coupling);

  Eigen::Index system_dim() const { return system_dim_; }
  const std::vector<Eigen::Index>& ancilla_dims() const { return ancilla_dims_; }
  Eigen::Index dim() const;
  std::vector<Eigen::Index> factor_dims() const;
  const COperator& free_hamiltonian() const { return free_hamiltonian_; }
  const std::vector<ScheduleTerm>& terms() const { return terms_; }
  bool has_free_hamiltonian() const;
  bool has_delta_terms() const;

  /// Union hull [min, max] of all window supports (in absolute time).
  std::pair<double, double> support_hull() const;
  /// True if every pair of windows has disjoint support.
  bool windows_disjoint() const;

  /// H_S (x) 1 + sum_i k_i(t - tau_i) K_i.  Delta terms are rejected.
  COperator coupling_at(double t) const;

  /// Ready state psi0 (x) |0> (x) |0> ...
  CVector ready_state(const CVector& system_state) const;

 private:
  Eigen::Index system_dim_;
  std::vector<Eigen::Index> ancilla_dims_;
  COperator free_hamiltonian_;
  std::vector<ScheduleTerm> terms_;
};

/// Outcome probabilities ||K^a psi||^2.
std::vector<double> kraus_probabilities(const KrausSet& kraus, const CVector& psi);

}  // namespace timeless
