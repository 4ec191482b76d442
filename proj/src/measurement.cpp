#include "timeless/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace timeless {

KrausSet::KrausSet(std::vector<COperator> operators) : operators_(std::move(operators)) {
  if (operators_.empty()) throw std::invalid_argument("KrausSet: no operators");
  const Eigen::Index d = operators_.front().rows();
  for (const auto& k : operators_) {
    if (k.rows() != d || k.cols() != d) throw DimensionError("KrausSet: operators must share a square shape");
    require_finite(k, "Kraus operator");
  }
  const double residual = completeness_residual();
  if (residual > 1e-10) {
    std::ostringstream msg;
    msg << "KrausSet: sum_a K^a^dagger K^a deviates from identity by " << residual;
    throw KrausCompletenessError(msg.str(), residual);
  }
}

KrausSet KrausSet::computational_basis(Eigen::Index dim) { return projective(identity(dim)); }

KrausSet KrausSet::projective(const COperator& basis) {
  if (!is_unitary(basis)) throw std::invalid_argument("KrausSet::projective: basis must be unitary");
  std::vector<COperator> ops;
  for (Eigen::Index a = 0; a < basis.cols(); ++a) ops.push_back(basis.col(a) * basis.col(a).adjoint());
  return KrausSet(std::move(ops));
}

double KrausSet::completeness_residual() const {
  const Eigen::Index d = operators_.front().rows();
  COperator sum = COperator::Zero(d, d);
  for (const auto& k : operators_) sum += k.adjoint() * k;
  return max_abs(sum - identity(d));
}

COperator purification_unitary(const KrausSet& kraus) {
  const Eigen::Index ds = kraus.system_dim();
  const Eigen::Index da = kraus.ancilla_dim();
  const Eigen::Index n = ds * da;
  COperator v = COperator::Zero(n, n);

  // Ready sector: column (s, r=0) is sum_a K^a |s> (x) |a>.
  for (Eigen::Index s = 0; s < ds; ++s) {
    for (Eigen::Index a = 0; a < da; ++a) {
      const auto& k = kraus.operators()[static_cast<std::size_t>(a)];
      for (Eigen::Index s_out = 0; s_out < ds; ++s_out) v(s_out * da + a, s * da) = k(s_out, s);
    }
  }

  std::vector<Eigen::Index> free_columns;
  for (Eigen::Index s = 0; s < ds; ++s) {
    for (Eigen::Index a = 1; a < da; ++a) free_columns.push_back(s * da + a);
  }

  std::vector<Eigen::Index> filled;
  for (Eigen::Index s = 0; s < ds; ++s) filled.push_back(s * da);

  std::size_t next = 0;
  for (Eigen::Index seed = 0; seed < n && next < free_columns.size(); ++seed) {
    CVector candidate = basis_vector(n, seed);
    // Two passes of classical Gram-Schmidt keep the columns orthonormal to rounding.
    for (int pass = 0; pass < 2; ++pass) {
      for (auto c : filled) candidate -= v.col(c) * v.col(c).dot(candidate);
    }
    const double norm = candidate.norm();
    if (norm < 1e-8) continue;
    const Eigen::Index column = free_columns[next++];
    v.col(column) = candidate / norm;
    filled.push_back(column);
  }
  if (next != free_columns.size()) throw std::runtime_error("purification_unitary: completion failed");
  return v;
}

WindowFunction WindowFunction::indicator(double a, double b, double height) {
  if (!(a < b)) throw std::invalid_argument("indicator window needs a < b");
  if (!std::isfinite(height)) throw std::invalid_argument("indicator height must be finite");
  return {WindowKind::Indicator, a, b, height};
}

WindowFunction WindowFunction::unit_indicator(double a, double b) { return indicator(a, b, 1.0 / (b - a)); }

WindowFunction WindowFunction::delta(double offset, double weight) {
  return {WindowKind::Delta, offset, 0.0, weight};
}

WindowFunction WindowFunction::gaussian(double offset, double sigma, double normalization) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian window needs sigma > 0");
  return {WindowKind::Gaussian, offset, sigma, normalization};
}

double WindowFunction::operator()(double x) const {
  switch (kind_) {
    case WindowKind::Indicator:
      return (x >= a_ && x < b_) ? scale_ : 0.0;
    case WindowKind::Gaussian:
      return interior_value(x);
    case WindowKind::Delta:
      break;
  }
  throw std::logic_error("delta windows have no pointwise value");
}

double WindowFunction::interior_value(double x) const {
  switch (kind_) {
    case WindowKind::Indicator:
      return (x >= a_ && x <= b_) ? scale_ : 0.0;
    case WindowKind::Gaussian: {
      const double z = (x - a_) / b_;
      if (std::abs(z) > 8.0) return 0.0;
      return scale_ * std::exp(-0.5 * z * z) / (b_ * std::sqrt(2.0 * std::numbers::pi));
    }
    case WindowKind::Delta:
      break;
  }
  throw std::logic_error("delta windows have no pointwise value");
}

std::pair<double, double> WindowFunction::support() const {
  switch (kind_) {
    case WindowKind::Indicator:
      return {a_, b_};
    case WindowKind::Gaussian:
      return {a_ - 8.0 * b_, a_ + 8.0 * b_};
    case WindowKind::Delta:
      return {a_, a_};
  }
  return {0.0, 0.0};
}

double WindowFunction::normalization() const {
  if (kind_ == WindowKind::Indicator) return scale_ * (b_ - a_);
  return scale_;
}

InteractionSchedule::InteractionSchedule(Eigen::Index system_dim, std::vector<Eigen::Index> ancilla_dims)
    : InteractionSchedule(system_dim, ancilla_dims, COperator::Zero(system_dim, system_dim)) {}

InteractionSchedule::InteractionSchedule(Eigen::Index system_dim, std::vector<Eigen::Index> ancilla_dims,
                                         COperator free_hamiltonian)
    : system_dim_(system_dim), ancilla_dims_(std::move(ancilla_dims)), free_hamiltonian_(std::move(free_hamiltonian)) {
  if (system_dim_ < 1) throw DimensionError("schedule: system dimension must be positive");
  for (auto d : ancilla_dims_) {
    if (d < 1) throw DimensionError("schedule: ancilla dimensions must be positive");
  }
  if (free_hamiltonian_.rows() != system_dim_ || free_hamiltonian_.cols() != system_dim_) {
    throw DimensionError("schedule: free Hamiltonian does not match the system dimension");
  }
  require_hermitian(free_hamiltonian_, 1e-10, "free Hamiltonian");
}

Eigen::Index InteractionSchedule::dim() const {
  auto dims = factor_dims();
  return product(dims);
}

std::vector<Eigen::Index> InteractionSchedule::factor_dims() const {
  std::vector<Eigen::Index> dims{system_dim_};
  dims.insert(dims.end(), ancilla_dims_.begin(), ancilla_dims_.end());
  return dims;
}

void InteractionSchedule::add_term(const WindowFunction& window, double center, const COperator& coupling) {
  if (coupling.rows() != dim() || coupling.cols() != dim()) {
    throw DimensionError("schedule: coupling does not act on system (x) ancillas");
  }
  require_finite(coupling, "coupling");
  require_hermitian(coupling, 1e-10, "coupling");
  if (!std::isfinite(center)) throw std::invalid_argument("schedule: centre must be finite");
  terms_.push_back({window, center, coupling});
}

bool InteractionSchedule::has_free_hamiltonian() const { return max_abs(free_hamiltonian_) > 0.0; }

bool InteractionSchedule::has_delta_terms() const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [](const ScheduleTerm& t) { return t.window.kind() == WindowKind::Delta; });
}

std::pair<double, double> InteractionSchedule::support_hull() const {
  if (terms_.empty()) return {0.0, 0.0};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& term : terms_) {
    const auto [a, b] = term.window.support();
    lo = std::min(lo, term.center + a);
    hi = std::max(hi, term.center + b);
  }
  return {lo, hi};
}

bool InteractionSchedule::windows_disjoint() const {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto [a1, b1] = terms_[i].window.support();
    for (std::size_t j = i + 1; j < terms_.size(); ++j) {
      const auto [a2, b2] = terms_[j].window.support();
      const double lo = std::max(terms_[i].center + a1, terms_[j].center + a2);
      const double hi = std::min(terms_[i].center + b1, terms_[j].center + b2);
      if (lo < hi || (lo == hi && (a1 == b1 || a2 == b2))) return false;
    }
  }
  return true;
}

COperator InteractionSchedule::coupling_at(double t) const {
  if (!std::isfinite(t)) throw std::invalid_argument("coupling_at: t must be finite");
  if (has_delta_terms()) throw std::invalid_argument("coupling_at: delta windows have no pointwise coupling");
  Eigen::Index ancilla = 1;
  for (auto d : ancilla_dims_) ancilla *= d;
  COperator k = kron(free_hamiltonian_, identity(ancilla));
  for (const auto& term : terms_) {
    const double w = term.window(t - term.center);
    if (w != 0.0) k += w * term.coupling;
  }
  return k;
}

CVector InteractionSchedule::ready_state(const CVector& system_state) const {
  if (system_state.size() != system_dim_) throw DimensionError("ready_state: system state has wrong dimension");
  CVector out = system_state;
  for (auto d : ancilla_dims_) out = kron(out, basis_vector(d, 0));
  return out;
}

std::vector<double> kraus_probabilities(const KrausSet& kraus, const CVector& psi) {
  std::vector<double> p;
  for (const auto& k : kraus.operators()) p.push_back((k * psi).squaredNorm());
  return p;
}

}  // namespace timeless
