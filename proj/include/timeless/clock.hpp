#pragma once

#include "timeless/tensor.hpp"

#include <string_view>

namespace timeless {

enum class ClockKind { ContinuumBounded, PeriodicFinite, DiscreteOrthogonal };

std::string_view to_string(ClockKind kind);
ClockKind clock_kind_from_string(std::string_view name);

/// Spectral data of a clock with energy half-width E.
///
/// Finite clocks (PeriodicFinite, DiscreteOrthogonal) share one spectrum: d
/// levels on the integer lattice e_n = (n - floor(d/2)) * 2E/d inside [-E, E].
/// That lattice always contains e = 0, gives period T = pi d / E and makes the
/// clock states at multiples of pi/E exactly orthonormal.  The two kinds
/// differ only in how time is sampled (continuous period vs. lattice).
class ClockModel {
 public:
  static ClockModel continuum(double energy);
  static ClockModel periodic(double energy, int dimension);
  static ClockModel discrete(double energy, int dimension);

  ClockKind kind() const { return kind_; }
  double energy() const { return energy_; }
  int dimension() const { return dimension_; }
  bool finite() const { return kind_ != ClockKind::ContinuumBounded; }

  /// N_C = E / pi for every kind.
  double normalization() const;
  /// Spacing of mutually orthogonal clock times, pi / E.
  double time_step() const;
  /// Recurrence time pi d / E (finite kinds only).
  double period() const;
  double level_spacing() const;
  RVector levels() const;
  COperator hamiltonian() const;

 private:
  ClockModel(ClockKind kind, double energy, int dimension);
  void require_finite_kind(const char* what) const;

  ClockKind kind_;
  double energy_;
  int dimension_;
};

/// Uniform grid t_min, t_min + h, ..., t_max with n >= 2 points.
class TimeGrid {
 public:
  TimeGrid(double t_min, double t_max, std::size_t n);
  /// Smallest uniform grid on [t_min, t_max] with spacing <= max_spacing.
  static TimeGrid with_max_spacing(double t_min, double t_max, double max_spacing);

  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  std::size_t size() const { return n_; }
  double spacing() const { return (t_max_ - t_min_) / static_cast<double>(n_ - 1); }
  double operator[](std::size_t i) const;
  /// Trapezoid weight of node i.
  double weight(std::size_t i) const;
  /// Index of the node nearest to t (clamped).
  std::size_t nearest(double t) const;

 private:
  double t_min_;
  double t_max_;
  std::size_t n_;
};

/// Coefficients of |phi_t> in the energy eigenbasis, component n = e^{-i e_n t}/sqrt(d).
CVector clock_state(const ClockModel& clock, double t);

/// ||N_C sum_i w_i |phi_{t_i}><phi_{t_i}| - 1||_max.  Trapezoid weights for
/// PeriodicFinite, unit weights (no N_C) for DiscreteOrthogonal.
double identity_resolution_check(const ClockModel& clock, const TimeGrid& grid);

}  // namespace timeless
