#include "timeless/kernels.hpp"

#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_expint.h>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace timeless;

namespace {

constexpr double kPi = std::numbers::pi;

struct Params {
  double energy;
  double t;
};

double gsl_integrate(double (*fn)(double, void*), Params p, double a, double b) {
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(10000);
  gsl_function f{fn, &p};
  double result = 0.0, error = 0.0;
  gsl_integration_qag(&f, a, b, 1e-14, 1e-13, 10000, GSL_INTEG_GAUSS61, ws, &result, &error);
  gsl_integration_workspace_free(ws);
  return result;
}

double spectral_density(double e, void* p) {
  const auto* q = static_cast<Params*>(p);
  return std::cos(e * q->t) / (2.0 * kPi);
}

double sinc_density(double s, void* p) {
  const auto* q = static_cast<Params*>(p);
  return s == 0.0 ? q->energy / kPi : std::sin(q->energy * s) / (kPi * s);
}

}  // namespace

TEST(SineIntegral, MatchesGslAcrossRanges) {
  double worst = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double x = -50.0 + i * 5e-4 * 1.0000037;
    worst = std::max(worst, std::abs(sine_integral(x) - gsl_sf_Si(x)));
  }
  EXPECT_LT(worst, 1e-13);
  for (double x : {41.0, 64.0, 250.0, 1e4, 1e7}) EXPECT_NEAR(sine_integral(x), gsl_sf_Si(x), 1e-14) << x;
}

TEST(SineIntegral, OddAndLimits) {
  EXPECT_EQ(sine_integral(0.0), 0.0);
  EXPECT_EQ(sine_integral(-3.2), -sine_integral(3.2));
  EXPECT_DOUBLE_EQ(sine_integral(INFINITY), kPi / 2);
  EXPECT_NEAR(sine_integral(1e-9), 1e-9, 1e-24);
}

TEST(OverlapKernel, SincLimitAndZeros) {
  EXPECT_NEAR(overlap_kernel_f(kPi, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(overlap_kernel_f(kPi, 1e-14), 1.0, 1e-12);
  EXPECT_NEAR(overlap_kernel_f(kPi, 1.0), 0.0, 1e-15);
}

TEST(OverlapKernel, AgreesWithSpectralQuadrature) {
  const double oracle = gsl_integrate(spectral_density, {1.0, kPi / 2}, -1.0, 1.0);
  EXPECT_NEAR(overlap_kernel_f(1.0, kPi / 2), oracle, 1e-10);
  EXPECT_NEAR(overlap_kernel_f(1.0, kPi / 2), 2.0 / (kPi * kPi), 1e-15);
}

TEST(CumulativeKernel, HalfAtOriginAndComplementary) {
  EXPECT_NEAR(cumulative_kernel_F(3.0, 0.0), 0.5, 1e-15);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-40.0, 40.0);
  for (int i = 0; i < 20; ++i) {
    const double t = u(rng);
    EXPECT_NEAR(cumulative_kernel_F(1.0, t) + cumulative_kernel_F(1.0, -t), 1.0, 1e-14);
  }
}

TEST(CumulativeKernel, AgreesWithAdaptiveQuadrature) {
  const double oracle = 0.5 + gsl_integrate(sinc_density, {25.0, 0.0}, 0.0, 5.0);
  EXPECT_NEAR(cumulative_kernel_F(25.0, 5.0), oracle, 1e-10);
  EXPECT_NEAR(cumulative_kernel_F(25.0, 5.0), 1.0, 3e-3);
}

TEST(CumulativeKernel, IsTheIntegralOfF) {
  const double a = -0.7, b = 1.3, energy = 4.0;
  const double integral = gsl_integrate(sinc_density, {energy, 0.0}, a, b);
  EXPECT_NEAR(cumulative_kernel_F(energy, b) - cumulative_kernel_F(energy, a), integral, 1e-12);
}

TEST(StepKernel, IdealIsHeaviside) {
  const auto ideal = StepKernel::ideal();
  EXPECT_TRUE(ideal.is_ideal());
  EXPECT_EQ(ideal.step(-1e-300), 0.0);
  EXPECT_EQ(ideal.step(0.0), 0.5);
  EXPECT_EQ(ideal.step(2.0), 1.0);
  EXPECT_THROW(ideal.energy(), std::logic_error);
  EXPECT_THROW(ideal.overlap(0.1), std::logic_error);
  EXPECT_THROW(StepKernel::bandlimited(-2.0), std::invalid_argument);
}

TEST(StepDeviation, ShrinksWithBandwidth) {
  const double d1 = max_step_deviation(1.0, 1.0, 200.0, 2000);
  const double d5 = max_step_deviation(5.0, 1.0, 200.0, 2000);
  const double d25 = max_step_deviation(25.0, 1.0, 200.0, 2000);
  EXPECT_GT(d1, d5);
  EXPECT_GT(d5, d25);
  // The deviation at t = 1 is 1/2 - Si(E)/pi; for E = 1 that is the maximum.
  EXPECT_NEAR(d1, 0.5 - gsl_sf_Si(1.0) / kPi, 1e-12);
}

TEST(KernelEvaluator, CachesQuantizedOffsets) {
  KernelEvaluator eval(2.0);
  EXPECT_NEAR(eval.F(0.3), cumulative_kernel_F(2.0, 0.3), 1e-11);
  EXPECT_NEAR(eval.f(0.3 + 1e-14), overlap_kernel_f(2.0, 0.3), 1e-11);
  EXPECT_EQ(eval.cache_size(), 1u);
}

TEST(Convolution, ReproducesKernels) {
  for (double t : {-1.0, 0.0, 0.5, 3.0}) {
    EXPECT_NEAR(convolve_f_f(2.0, t), overlap_kernel_f(2.0, t), 1e-5) << t;
    EXPECT_NEAR(convolve_f_F(2.0, t), cumulative_kernel_F(2.0, t), 1e-5) << t;
  }
}

TEST(Convolution, RejectsTooNarrowWindow) {
  ConvolutionOptions o;
  o.points = 100;
  EXPECT_THROW(convolve_f_f(2.0, 50.0, o), std::invalid_argument);
}

TEST(KernelTable, CsvLayout) {
  std::ostringstream out;
  write_kernel_table(out, 5.0, TimeGrid(-1.0, 1.0, 3));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,f,F,E");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
}
