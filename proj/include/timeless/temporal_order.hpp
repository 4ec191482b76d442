#pragma once

// First- and second-order Born-series weights for two disjoint measurement
// windows, and the F(t - t1) F(t1 - t2) heat map.

#include "timeless/kernels.hpp"
#include "timeless/measurement.hpp"

#include <iosfwd>
#include <vector>

namespace timeless {

/// Weights of the second-order term
///   (-i)^2 [c11 K1 K1 + c22 K2 K2 + causal K2 K1 + acausal K1 K2] psi0.
struct SecondOrderCoefficients {
  double c11 = 0.0;
  double c22 = 0.0;
  double causal = 0.0;   // multiplies K2 K1: the earlier event acts first
  double acausal = 0.0;  // multiplies K1 K2: the later event acts first

  /// |acausal| / |causal|
  double ratio() const;
};

struct OrderAnalysis {
  double energy = 0.0;  // 0 for the ideal kernel
  double tau1 = 0.0;
  double tau2 = 0.0;
  double t_eval = 0.0;
  SecondOrderCoefficients coefficients;
  /// Reported as indefinite when ratio() exceeds this threshold.
  double threshold = 1e-6;
  bool indefinite() const { return coefficients.ratio() > threshold; }
};

/// |int dt1 k(t1 - tau) F(t - t1)| for each t.
std::vector<double> first_order_magnitude(const StepKernel& kernel, const WindowFunction& window, double tau,
                                          const std::vector<double>& times, double spacing = 1e-3);

/// 2-D trapezoid over the two window supports with spacing <= `spacing`
/// (edges are nodes).  The windows must be disjoint.
SecondOrderCoefficients second_order_coefficients(const StepKernel& kernel, const WindowFunction& window,
                                                  double tau1, double tau2, double t, double spacing = 0.005);
/// Same quadrature, one thread, no precomputed kernel tables.
SecondOrderCoefficients second_order_coefficients_serial(const StepKernel& kernel, const WindowFunction& window,
                                                         double tau1, double tau2, double t,
                                                         double spacing = 0.005);

/// int int dt1 dt2 F(t - t1) F(t1 - t2) k(t1 - tau1) k(t2 - tau2)
double acausal_coefficient(const StepKernel& kernel, const WindowFunction& window, double tau1, double tau2,
                           double t, double spacing = 0.005);

OrderAnalysis analyze_order(const StepKernel& kernel, const WindowFunction& window, double tau1, double tau2,
                            double t, double spacing = 0.005);

/// Second-order state correction assembled from the coefficients.
CVector second_order_term(const SecondOrderCoefficients& c, const COperator& k1, const COperator& k2,
                          const CVector& psi0);

/// F(t - t1) F(t1 - t2); rows follow grid1 (t1), columns grid2 (t2).
Eigen::MatrixXd heatmap_product(const StepKernel& kernel, double t, const TimeGrid& grid1, const TimeGrid& grid2);

/// Header "t1,<t2 values...>", then one row per t1.
void write_heatmap_csv(std::ostream& out, const TimeGrid& grid1, const TimeGrid& grid2, const Eigen::MatrixXd& values);

struct CoefficientRow {
  double energy;
  SecondOrderCoefficients coefficients;
};
/// Columns E, causal, acausal, ratio.
void write_coefficient_scan(std::ostream& out, const std::vector<CoefficientRow>& rows);

}  // namespace timeless
