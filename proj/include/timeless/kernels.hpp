#pragma once

// Overlap kernel f(t) = N_C <phi_t|phi_0> = sin(E t) / (pi t) and its
// half-line integral F(t) = 1/2 + Si(E t) / pi, the smooth step that controls
// every non-ideal effect.

#include "timeless/clock.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <shared_mutex>
#include <utility>

namespace timeless {

/// Sine integral Si(x) = int_0^x sin(u)/u du.  Piecewise Chebyshev table on
/// |x| <= 40 (fitted to the power series and the continued fraction of the
/// auxiliary functions), asymptotic expansion beyond.
double sine_integral(double x);

double overlap_kernel_f(double energy, double dt);
double cumulative_kernel_F(double energy, double t);

/// Either the band-limited step F_E or the ideal Heaviside step (Theta(0) = 1/2).
class StepKernel {
 public:
  static StepKernel ideal() { return StepKernel(std::nullopt); }
  static StepKernel bandlimited(double energy);

  bool is_ideal() const { return !energy_; }
  /// Throws for the ideal kernel.
  double energy() const;

  double step(double t) const;
  /// Overlap kernel f; not defined (throws) for the ideal kernel.
  double overlap(double t) const;

 private:
  explicit StepKernel(std::optional<double> energy) : energy_(energy) {}
  std::optional<double> energy_;
};

/// Cached (f, F) pairs keyed by offsets quantized to 1e-12.  Concurrent
/// lookups are safe; racing fills compute identical values.
class KernelEvaluator {
 public:
  static constexpr double kQuantum = 1e-12;

  explicit KernelEvaluator(double energy);

  double energy() const { return energy_; }
  std::pair<double, double> values(double dt) const;
  double f(double dt) const { return values(dt).first; }
  double F(double dt) const { return values(dt).second; }
  std::size_t cache_size() const;

 private:
  double energy_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::int64_t, std::pair<double, double>> cache_;
};

/// Writes the kernel table on `grid` as CSV with header "t,f,F,E".
void write_kernel_table(std::ostream& out, double energy, const TimeGrid& grid);

/// max over sampled |t| >= t_min of |F(t) - Theta(t)|, sampled with
/// `samples_per_unit` points per unit time up to t_max.
double max_step_deviation(double energy, double t_min, double t_max, int samples_per_unit);

/// Numerical convolutions of the kernels on a uniform grid of `points` nodes
/// centred on t/2, with the slowly decaying far field added analytically.
struct ConvolutionOptions {
  std::size_t points = 4000;
  double spacing = 0.0;  // 0 picks min(0.1, 0.5 / E)
};
double convolve_f_f(double energy, double t, ConvolutionOptions options = {});
double convolve_f_F(double energy, double t, ConvolutionOptions options = {});

}  // namespace timeless
