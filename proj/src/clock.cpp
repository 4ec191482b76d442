#include "timeless/clock.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace timeless {

std::string_view to_string(ClockKind kind) {
  switch (kind) {
    case ClockKind::ContinuumBounded:
      return "continuum";
    case ClockKind::PeriodicFinite:
      return "periodic";
    case ClockKind::DiscreteOrthogonal:
      return "discrete";
  }
  return "unknown";
}

ClockKind clock_kind_from_string(std::string_view name) {
  if (name == "continuum") return ClockKind::ContinuumBounded;
  if (name == "periodic") return ClockKind::PeriodicFinite;
  if (name == "discrete") return ClockKind::DiscreteOrthogonal;
  throw std::invalid_argument("unknown clock kind '" + std::string(name) +
                              "' (expected continuum, periodic or discrete)");
}

ClockModel::ClockModel(ClockKind kind, double energy, int dimension)
    : kind_(kind), energy_(energy), dimension_(dimension) {
  if (!(energy > 0.0) || !std::isfinite(energy)) {
    throw std::invalid_argument("clock energy E must be positive and finite");
  }
  if (kind != ClockKind::ContinuumBounded && dimension < 2) {
    throw std::invalid_argument("finite clock dimension must be >= 2");
  }
}

ClockModel ClockModel::continuum(double energy) { return {ClockKind::ContinuumBounded, energy, 0}; }
ClockModel ClockModel::periodic(double energy, int dimension) {
  return {ClockKind::PeriodicFinite, energy, dimension};
}
ClockModel ClockModel::discrete(double energy, int dimension) {
  return {ClockKind::DiscreteOrthogonal, energy, dimension};
}

void ClockModel::require_finite_kind(const char* what) const {
  if (!finite()) {
    throw std::invalid_argument(std::string(what) +
                                ": continuum clock has no finite vector representation; use the kernels");
  }
}

double ClockModel::normalization() const { return energy_ / std::numbers::pi; }
double ClockModel::time_step() const { return std::numbers::pi / energy_; }

double ClockModel::period() const {
  require_finite_kind("period");
  return std::numbers::pi * dimension_ / energy_;
}

double ClockModel::level_spacing() const {
  require_finite_kind("level_spacing");
  return 2.0 * energy_ / dimension_;
}

RVector ClockModel::levels() const {
  require_finite_kind("levels");
  RVector e(dimension_);
  const int zero = dimension_ / 2;
  for (int n = 0; n < dimension_; ++n) e(n) = (n - zero) * level_spacing();
  return e;
}

COperator ClockModel::hamiltonian() const {
  return levels().cast<Complex>().asDiagonal();
}

TimeGrid::TimeGrid(double t_min, double t_max, std::size_t n) : t_min_(t_min), t_max_(t_max), n_(n) {
  if (n < 2) throw std::invalid_argument("TimeGrid needs at least 2 points");
  if (!(t_max > t_min)) throw std::invalid_argument("TimeGrid needs t_max > t_min");
}

TimeGrid TimeGrid::with_max_spacing(double t_min, double t_max, double max_spacing) {
  if (!(max_spacing > 0.0)) throw std::invalid_argument("TimeGrid spacing must be positive");
  const auto intervals = static_cast<std::size_t>(std::ceil((t_max - t_min) / max_spacing - 1e-9));
  return {t_min, t_max, std::max<std::size_t>(intervals, 1) + 1};
}

double TimeGrid::operator[](std::size_t i) const {
  if (i + 1 == n_) return t_max_;
  return t_min_ + spacing() * static_cast<double>(i);
}

double TimeGrid::weight(std::size_t i) const {
  const double h = spacing();
  return (i == 0 || i + 1 == n_) ? 0.5 * h : h;
}

std::size_t TimeGrid::nearest(double t) const {
  const double x = std::round((t - t_min_) / spacing());
  if (x <= 0.0) return 0;
  return std::min(n_ - 1, static_cast<std::size_t>(x));
}

CVector clock_state(const ClockModel& clock, double t) {
  if (!clock.finite()) {
    throw std::invalid_argument("clock_state: continuum clock has no finite vector representation");
  }
  if (!std::isfinite(t)) throw std::invalid_argument("clock_state: t must be finite");
  const RVector e = clock.levels();
  const double norm = 1.0 / std::sqrt(static_cast<double>(clock.dimension()));
  CVector v(e.size());
  for (Eigen::Index n = 0; n < e.size(); ++n) v(n) = norm * std::exp(-kI * e(n) * t);
  return v;
}

double identity_resolution_check(const ClockModel& clock, const TimeGrid& grid) {
  if (!clock.finite()) throw std::invalid_argument("identity_resolution_check: finite clock required");
  const Eigen::Index d = clock.dimension();
  COperator sum = COperator::Zero(d, d);
  const bool lattice = clock.kind() == ClockKind::DiscreteOrthogonal;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const CVector phi = clock_state(clock, grid[i]);
    const double w = lattice ? 1.0 : clock.normalization() * grid.weight(i);
    sum += w * phi * phi.adjoint();
  }
  return max_abs(sum - identity(d));
}

}  // namespace timeless
