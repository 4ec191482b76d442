#include "timeless/temporal_order.hpp"

#include "timeless/csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace timeless {

namespace {

struct Quadrature {
  std::vector<double> t;
  std::vector<double> w;  // trapezoid weight times window value
};

Quadrature window_quadrature(const WindowFunction& window, double tau, double spacing) {
  if (window.kind() == WindowKind::Delta) return {{tau + window.offset()}, {window.scale()}};
  const auto [a, b] = window.support();
  const TimeGrid g = TimeGrid::with_max_spacing(tau + a, tau + b, spacing);
  Quadrature q;
  for (std::size_t i = 0; i < g.size(); ++i) {
    q.t.push_back(g[i]);
    q.w.push_back(g.weight(i) * window.interior_value(g[i] - tau));
  }
  return q;
}

// int_{-inf}^{x} k(y) dy, the first-order term under the ideal kernel.
double window_mass_below(const WindowFunction& window, double x) {
  switch (window.kind()) {
    case WindowKind::Indicator:
      return window.scale() * std::clamp(x - window.a(), 0.0, window.b() - window.a());
    case WindowKind::Delta:
      return window.scale() * StepKernel::ideal().step(x - window.offset());
    case WindowKind::Gaussian:
      return window.scale() * 0.5 * std::erfc((window.offset() - x) / (window.sigma() * std::sqrt(2.0)));
  }
  return 0.0;
}

void require_disjoint(const WindowFunction& window, double tau1, double tau2) {
  const auto [a, b] = window.support();
  if (!(tau2 + a >= tau1 + b)) throw std::invalid_argument("second-order analysis needs disjoint windows, tau1 first");
}

// sum_ij w_i w_j F(t - s_i) F(s_i - r_j) over first variable s, second r.
double pair_sum(const StepKernel& kernel, const Quadrature& s, const Quadrature& r, double t) {
  const auto n = static_cast<std::ptrdiff_t>(s.t.size());
  double total = 0.0;
#pragma omp parallel for reduction(+ : total) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    double inner = 0.0;
    for (std::size_t j = 0; j < r.t.size(); ++j) inner += r.w[j] * kernel.step(s.t[u] - r.t[j]);
    total += s.w[u] * kernel.step(t - s.t[u]) * inner;
  }
  return total;
}

}  // namespace

double SecondOrderCoefficients::ratio() const {
  if (causal == 0.0) return acausal == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(acausal) / std::abs(causal);
}

std::vector<double> first_order_magnitude(const StepKernel& kernel, const WindowFunction& window, double tau,
                                          const std::vector<double>& times, double spacing) {
  std::vector<double> out(times.size());
  if (kernel.is_ideal()) {
    for (std::size_t i = 0; i < times.size(); ++i) out[i] = std::abs(window_mass_below(window, times[i] - tau));
    return out;
  }
  const Quadrature q = window_quadrature(window, tau, spacing);
  const auto n = static_cast<std::ptrdiff_t>(times.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    double sum = 0.0;
    for (std::size_t j = 0; j < q.t.size(); ++j) sum += q.w[j] * kernel.step(times[u] - q.t[j]);
    out[u] = std::abs(sum);
  }
  return out;
}

SecondOrderCoefficients second_order_coefficients(const StepKernel& kernel, const WindowFunction& window,
                                                  double tau1, double tau2, double t, double spacing) {
  require_disjoint(window, tau1, tau2);
  const Quadrature q1 = window_quadrature(window, tau1, spacing);
  const Quadrature q2 = window_quadrature(window, tau2, spacing);
  SecondOrderCoefficients c;
  c.c11 = pair_sum(kernel, q1, q1, t);
  c.c22 = pair_sum(kernel, q2, q2, t);
  c.causal = pair_sum(kernel, q2, q1, t);
  c.acausal = pair_sum(kernel, q1, q2, t);
  return c;
}

SecondOrderCoefficients second_order_coefficients_serial(const StepKernel& kernel, const WindowFunction& window,
                                                         double tau1, double tau2, double t, double spacing) {
  require_disjoint(window, tau1, tau2);
  const Quadrature q[2] = {window_quadrature(window, tau1, spacing), window_quadrature(window, tau2, spacing)};
  double sums[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      for (std::size_t i = 0; i < q[x].t.size(); ++i) {
        for (std::size_t j = 0; j < q[y].t.size(); ++j) {
          sums[x][y] += q[x].w[i] * q[y].w[j] * kernel.step(t - q[x].t[i]) * kernel.step(q[x].t[i] - q[y].t[j]);
        }
      }
    }
  }
  return {sums[0][0], sums[1][1], sums[1][0], sums[0][1]};
}

double acausal_coefficient(const StepKernel& kernel, const WindowFunction& window, double tau1, double tau2,
                           double t, double spacing) {
  require_disjoint(window, tau1, tau2);
  return pair_sum(kernel, window_quadrature(window, tau1, spacing), window_quadrature(window, tau2, spacing), t);
}

OrderAnalysis analyze_order(const StepKernel& kernel, const WindowFunction& window, double tau1, double tau2,
                            double t, double spacing) {
  OrderAnalysis a;
  a.energy = kernel.is_ideal() ? 0.0 : kernel.energy();
  a.tau1 = tau1;
  a.tau2 = tau2;
  a.t_eval = t;
  a.coefficients = second_order_coefficients(kernel, window, tau1, tau2, t, spacing);
  return a;
}

CVector second_order_term(const SecondOrderCoefficients& c, const COperator& k1, const COperator& k2,
                          const CVector& psi0) {
  const COperator weight = c.c11 * k1 * k1 + c.c22 * k2 * k2 + c.causal * k2 * k1 + c.acausal * k1 * k2;
  return -(weight * psi0);
}

Eigen::MatrixXd heatmap_product(const StepKernel& kernel, double t, const TimeGrid& grid1, const TimeGrid& grid2) {
  Eigen::MatrixXd out(grid1.size(), grid2.size());
  const auto rows = static_cast<std::ptrdiff_t>(grid1.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const double t1 = grid1[static_cast<std::size_t>(i)];
    const double outer = kernel.step(t - t1);
    for (std::size_t j = 0; j < grid2.size(); ++j) out(i, static_cast<Eigen::Index>(j)) = outer * kernel.step(t1 - grid2[j]);
  }
  return out;
}

void write_heatmap_csv(std::ostream& out, const TimeGrid& grid1, const TimeGrid& grid2, const Eigen::MatrixXd& values) {
  out << "t1";
  for (std::size_t j = 0; j < grid2.size(); ++j) out << ',' << csv::num(grid2[j]);
  out << '\n';
  for (std::size_t i = 0; i < grid1.size(); ++i) {
    out << csv::num(grid1[i]);
    for (std::size_t j = 0; j < grid2.size(); ++j) {
      out << ',' << csv::num(values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    out << '\n';
  }
}

void write_coefficient_scan(std::ostream& out, const std::vector<CoefficientRow>& rows) {
  out << "E,causal,acausal,ratio\n";
  for (const auto& r : rows) {
    out << csv::num(r.energy) << ',' << csv::num(r.coefficients.causal) << ',' << csv::num(r.coefficients.acausal)
        << ',' << csv::num(r.coefficients.ratio()) << '\n';
  }
}

}  // namespace timeless
