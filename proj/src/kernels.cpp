#include "timeless/kernels.hpp"

#include "timeless/csv.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace timeless {

namespace {

constexpr double kPi = std::numbers::pi;

double sine_integral_series(double x) {
  // Si(x) = sum_k (-1)^k x^{2k+1} / ((2k+1) (2k+1)!)
  const double x2 = x * x;
  double term = x;  // (-1)^k x^{2k+1} / (2k+1)!
  double sum = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double contribution = term / (2 * k + 1);
    sum += contribution;
    if (std::abs(contribution) < 1e-17 * std::abs(sum)) break;
    term *= -x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
  }
  return sum;
}

// Si(x) = pi/2 + Im[e^{-ix} g(x)] where g is the continued fraction of
// e^{ix} E1(ix) = 1/(1 + ix - 1^2/(3 + ix - 2^2/(5 + ix - ...))), evaluated
// with the modified Lentz method.
double sine_integral_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  std::complex<double> b{1.0, x};
  std::complex<double> c = 1.0 / tiny;
  std::complex<double> d = 1.0 / b;
  std::complex<double> h = d;
  for (int i = 2; i < 100000; ++i) {
    const double a = -static_cast<double>(i - 1) * static_cast<double>(i - 1);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const std::complex<double> del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  h *= std::complex<double>{std::cos(x), -std::sin(x)};
  return 0.5 * kPi + h.imag();
}

double sine_integral_direct(double x) {
  return x <= 4.0 ? sine_integral_series(x) : sine_integral_continued_fraction(x);
}

// Si(x) = pi/2 - f(x) cos x - g(x) sin x with the asymptotic series
// f ~ sum (-1)^k (2k)! / x^{2k+1}, g ~ sum (-1)^k (2k+1)! / x^{2k+2}.
double sine_integral_asymptotic(double x) {
  const double inv2 = 1.0 / (x * x);
  double f = 0.0, g = 0.0;
  double tf = 1.0 / x, tg = inv2;
  for (int k = 0; k < 30; ++k) {
    f += tf;
    g += tg;
    tf *= -(2.0 * k + 1.0) * (2.0 * k + 2.0) * inv2;
    tg *= -(2.0 * k + 2.0) * (2.0 * k + 3.0) * inv2;
    if (std::abs(tf) < 1e-18 && std::abs(tg) < 1e-18) break;
  }
  return 0.5 * kPi - f * std::cos(x) - g * std::sin(x);
}

// Piecewise Chebyshev interpolant of Si on [0, kTableEnd], fitted once to the
// direct evaluation.
class SineIntegralTable {
 public:
  static constexpr double kTableEnd = 40.0;
  static constexpr double kPanel = 0.5;
  static constexpr int kDegree = 20;
  static constexpr int kPanels = static_cast<int>(kTableEnd / kPanel);

  SineIntegralTable() : coefficients_(static_cast<std::size_t>(kPanels) * (kDegree + 1)) {
    constexpr int n = kDegree + 1;
    std::array<double, n> nodes{};
    for (int p = 0; p < kPanels; ++p) {
      const double mid = (p + 0.5) * kPanel;
      for (int j = 0; j < n; ++j) {
        const double u = std::cos(kPi * (j + 0.5) / n);
        nodes[j] = sine_integral_direct(mid + 0.5 * kPanel * u);
      }
      for (int k = 0; k < n; ++k) {
        double c = 0.0;
        for (int j = 0; j < n; ++j) c += nodes[j] * std::cos(kPi * k * (j + 0.5) / n);
        coefficients_[static_cast<std::size_t>(p) * n + k] = (k == 0 ? 1.0 : 2.0) * c / n;
      }
    }
  }

  double operator()(double x) const {
    const int p = std::min(static_cast<int>(x / kPanel), kPanels - 1);
    const double u = (x - (p + 0.5) * kPanel) / (0.5 * kPanel);
    const double* c = coefficients_.data() + static_cast<std::size_t>(p) * (kDegree + 1);
    double b1 = 0.0, b2 = 0.0;
    for (int k = kDegree; k >= 1; --k) {
      const double b0 = 2.0 * u * b1 - b2 + c[k];
      b2 = b1;
      b1 = b0;
    }
    return u * b1 - b2 + c[0];
  }

 private:
  std::vector<double> coefficients_;
};

}  // namespace

double sine_integral(double x) {
  if (!std::isfinite(x)) {
    if (std::isnan(x)) return x;
    return x > 0 ? 0.5 * kPi : -0.5 * kPi;
  }
  static const SineIntegralTable table;
  const double ax = std::abs(x);
  double value;
  if (ax < SineIntegralTable::kPanel) {
    value = sine_integral_series(ax);
  } else if (ax <= SineIntegralTable::kTableEnd) {
    value = table(ax);
  } else {
    value = sine_integral_asymptotic(ax);
  }
  return x < 0 ? -value : value;
}

double overlap_kernel_f(double energy, double dt) {
  if (!(energy > 0.0)) throw std::invalid_argument("overlap_kernel_f: E must be positive");
  if (std::abs(dt) < 1e-12) return energy / kPi;
  return std::sin(energy * dt) / (kPi * dt);
}

double cumulative_kernel_F(double energy, double t) {
  if (!(energy > 0.0)) throw std::invalid_argument("cumulative_kernel_F: E must be positive");
  return 0.5 + sine_integral(energy * t) / kPi;
}

StepKernel StepKernel::bandlimited(double energy) {
  if (!(energy > 0.0) || !std::isfinite(energy)) {
    throw std::invalid_argument("StepKernel: E must be positive and finite");
  }
  return StepKernel(energy);
}

double StepKernel::energy() const {
  if (!energy_) throw std::logic_error("StepKernel: ideal kernel has no energy");
  return *energy_;
}

double StepKernel::step(double t) const {
  if (energy_) return cumulative_kernel_F(*energy_, t);
  if (t > 0.0) return 1.0;
  if (t < 0.0) return 0.0;
  return 0.5;
}

double StepKernel::overlap(double t) const {
  if (!energy_) throw std::logic_error("StepKernel: the ideal overlap kernel is a delta distribution");
  return overlap_kernel_f(*energy_, t);
}

KernelEvaluator::KernelEvaluator(double energy) : energy_(energy) {
  if (!(energy > 0.0)) throw std::invalid_argument("KernelEvaluator: E must be positive");
}

std::pair<double, double> KernelEvaluator::values(double dt) const {
  const auto key = static_cast<std::int64_t>(std::llround(dt / kQuantum));
  {
    std::shared_lock lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const double quantized = static_cast<double>(key) * kQuantum;
  const std::pair<double, double> fresh{overlap_kernel_f(energy_, quantized),
                                        cumulative_kernel_F(energy_, quantized)};
  std::unique_lock lock(mutex_);
  return cache_.try_emplace(key, fresh).first->second;
}

std::size_t KernelEvaluator::cache_size() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

void write_kernel_table(std::ostream& out, double energy, const TimeGrid& grid) {
  out << "t,f,F,E\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    out << csv::num(t) << ',' << csv::num(overlap_kernel_f(energy, t)) << ','
        << csv::num(cumulative_kernel_F(energy, t)) << ',' << csv::num(energy) << '\n';
  }
}

double max_step_deviation(double energy, double t_min, double t_max, int samples_per_unit) {
  if (!(t_max > t_min) || t_min < 0.0 || samples_per_unit < 1) {
    throw std::invalid_argument("max_step_deviation: need 0 <= t_min < t_max and positive sampling");
  }
  // |F(-t) - Theta(-t)| = |F(t) - Theta(t)| by evenness of f, so t > 0 suffices.
  const auto n = static_cast<std::size_t>(std::ceil((t_max - t_min) * samples_per_unit)) + 1;
  const TimeGrid grid(t_min, t_max, n);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    worst = std::max(worst, std::abs(cumulative_kernel_F(energy, grid[i]) - 1.0));
  }
  return worst;
}

namespace {

// int_{tails} dtau / (tau (t - tau)) = -g, tails = |tau - t/2| > L.
double tail_log_factor(double t, double half_width) {
  const double a = 0.5 * t;
  if (std::abs(a) < 1e-9 * half_width) return 2.0 / half_width;
  return (2.0 / t) * std::log1p(2.0 * a / (half_width - a));
}

// int_x^inf sin(u)/u du for large x from the asymptotic auxiliary functions.
double sine_tail_asymptotic(double x) {
  const double y = 1.0 / (x * x);
  const double fa = (1.0 - y * (2.0 - y * (24.0 - y * 720.0))) / x;
  const double ga = (1.0 - y * (6.0 - y * (120.0 - y * 5040.0))) * y;
  return fa * std::cos(x) + ga * std::sin(x);
}

struct Layout {
  double h;
  double half_width;
  double start;
};

Layout convolution_layout(double energy, double t, const ConvolutionOptions& options) {
  if (options.points < 16) throw std::invalid_argument("convolution needs at least 16 points");
  const double h = options.spacing > 0.0 ? options.spacing : std::min(0.1, 0.5 / energy);
  const double half_width = 0.5 * h * static_cast<double>(options.points - 1);
  if (half_width <= std::abs(t)) throw std::invalid_argument("convolution window narrower than |t|");
  return {h, half_width, 0.5 * t - half_width};
}

}  // namespace

double convolve_f_f(double energy, double t, ConvolutionOptions options) {
  const Layout layout = convolution_layout(energy, t, options);
  double sum = 0.0;
  for (std::size_t k = 0; k < options.points; ++k) {
    const double tau = layout.start + layout.h * static_cast<double>(k);
    const double w = (k == 0 || k + 1 == options.points) ? 0.5 : 1.0;
    sum += w * overlap_kernel_f(energy, tau) * overlap_kernel_f(energy, t - tau);
  }
  sum *= layout.h;
  // Far field: sin(E tau) sin(E(t-tau)) has the non-oscillating part -cos(E t)/2.
  const double g = tail_log_factor(t, layout.half_width);
  return sum + std::cos(energy * t) * g / (2.0 * kPi * kPi);
}

double convolve_f_F(double energy, double t, ConvolutionOptions options) {
  const Layout layout = convolution_layout(energy, t, options);
  double sum = 0.0;
  for (std::size_t k = 0; k < options.points; ++k) {
    const double tau = layout.start + layout.h * static_cast<double>(k);
    const double w = (k == 0 || k + 1 == options.points) ? 0.5 : 1.0;
    sum += w * overlap_kernel_f(energy, tau) * cumulative_kernel_F(energy, t - tau);
  }
  sum *= layout.h;
  // Far field uses F(s) ~ Theta(s) - cos(E s) / (pi E s).
  const double left_mass = sine_tail_asymptotic(energy * (layout.half_width - 0.5 * t)) / kPi;
  const double g = tail_log_factor(t, layout.half_width);
  return sum + left_mass + std::sin(energy * t) * g / (2.0 * kPi * kPi * energy);
}

}  // namespace timeless
