#include "vswap/numerics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>

using namespace vswap::numerics;

namespace {

// Matrix exponential by scaling-and-squaring with a Taylor series; test-only
// oracle, independent of the RK4 integrators it checks.
template <class MatT>
MatT expm_oracle(MatT a) {
  int squarings = 0;
  double norm = a.cwiseAbs().sum();
  while (norm > 0.25) {
    a *= 0.5;
    norm *= 0.5;
    ++squarings;
  }
  MatT term = MatT::Identity(a.rows(), a.cols());
  MatT sum = term;
  for (int k = 1; k <= 24; ++k) {
    term = MatT(term * a) / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = MatT(sum * sum);
  return sum;
}

}  // namespace

TEST(GridFn, ExactAtNodesAndLinearBetween) {
  std::vector<double> vals{1.0, 3.0, 5.0, 7.0};
  GridFn<double> g(0.0, 3.0, vals);
  for (int i = 0; i <= 3; ++i) EXPECT_DOUBLE_EQ(g.eval(g.node_time(i)), vals[i]);
  EXPECT_DOUBLE_EQ(g.eval(0.5), 2.0);   // midpoint of linear data = mean
  EXPECT_DOUBLE_EQ(g.eval(2.25), 5.5);
}

TEST(GridFn, OutOfRangeThrows) {
  GridFn<double> g(0.0, 1.0, {0.0, 1.0});
  EXPECT_THROW(g.eval(-0.01), std::out_of_range);
  EXPECT_THROW(g.eval(1.01), std::out_of_range);
  EXPECT_NO_THROW(g.eval(1.0 + 1e-13));  // slack at the edges
}

TEST(GridFn, InterpolationErrorBoundOnSin) {
  const int n = 100;
  std::vector<double> vals(n + 1);
  for (int i = 0; i <= n; ++i) vals[i] = std::sin(2.0 * M_PI * i / n);
  GridFn<double> g(0.0, 1.0, vals);
  const double h = g.dt();
  double max_err = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double t = k / 999.0;
    max_err = std::max(max_err, std::abs(g.eval(t) - std::sin(2.0 * M_PI * t)));
  }
  // linear interpolation error <= h^2/8 * max|f''| = h^2/8 * (2 pi)^2 < h^2 * 5
  EXPECT_LE(max_err, 5.0 * h * h);
  EXPECT_GT(max_err, 0.0);
}

TEST(GridFn, RejectsDegenerateSpans) {
  EXPECT_THROW(GridFn<double>(1.0, 1.0, {0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(GridFn<double>(0.0, 1.0, {0.0}), std::invalid_argument);
}

TEST(OdeConfig, StepCountsAndValidation) {
  OdeConfig cfg;
  EXPECT_EQ(cfg.steps_for(1.0), 2000);
  EXPECT_EQ(cfg.steps_for(1.0 / 52.0), 39);
  EXPECT_EQ(cfg.steps_for(0.0), 1);
  OdeConfig bad{8};
  EXPECT_THROW(bad.require_valid(), std::invalid_argument);
}

TEST(SolveBackward, ZeroRhsStaysAtTerminal) {
  auto g = solve_backward([](double, double) { return 0.0; }, 0.0, 1.0, 0.0, 64);
  for (const double v : g.values()) EXPECT_EQ(v, 0.0);
}

TEST(SolveBackward, ExponentialDecayOracle) {
  // dy/dt = -y, y(1) = 1  =>  y(0) = e
  auto g = solve_backward([](double, double y) { return -y; }, 0.0, 1.0, 1.0, 2000);
  EXPECT_EQ(g.back(), 1.0);  // terminal node exact
  EXPECT_NEAR(g.front(), std::exp(1.0), 1e-10);
}

TEST(SolveBackward, FourthOrderConvergence) {
  auto err = [](int n) {
    auto g = solve_backward([](double, double y) { return -y; }, 0.0, 1.0, 1.0, n);
    return std::abs(g.front() - std::exp(1.0));
  };
  const double ratio = err(32) / err(64);
  EXPECT_GE(ratio, 12.0);
  EXPECT_LE(ratio, 20.0);
}

TEST(SolveBackward, LinearRiccatiReductionOracle) {
  // -dM/dt = (1/2) eta^2 M^2 - alpha M with eta = 0 is linear:
  // M(t) = e^{-alpha (T - t)} M(T).
  const double alpha = 1.2, terminal = 0.7, T = 2.0;
  auto g = solve_backward(
      [alpha](double, double m) { return -(-alpha * m); }, 0.0, T, terminal, 4000);
  for (int i = 0; i <= g.steps(); i += 400) {
    const double t = g.node_time(i);
    EXPECT_NEAR(g.node(i), terminal * std::exp(-alpha * (T - t)), 1e-12);
  }
}

TEST(SolveBackward, ComplexValuesSupported) {
  const Complex terminal(0.3, -0.2);
  auto g = solve_backward(
      [](double, Complex y) { return Complex(0.0, 1.0) * y; }, 0.0, 1.0, terminal, 512);
  // dy/dt = i y  =>  y(0) = e^{-i} y(1)
  const Complex expected = std::exp(Complex(0.0, -1.0)) * terminal;
  EXPECT_NEAR(std::abs(g.front() - expected), 0.0, 1e-12);
}

TEST(SolveBackward, ReportsBlowUpTime) {
  // dy/dt = -y^2 backward from y(1) = 2 blows up marching towards t = 0.5.
  bool threw = false;
  try {
    solve_backward([](double, double y) { return -y * y; }, 0.0, 1.0, 2.0, 4096);
  } catch (const NumericError& e) {
    threw = true;
    EXPECT_GT(e.time(), 0.0);
    EXPECT_LT(e.time(), 1.0);
  }
  EXPECT_TRUE(threw);
}

TEST(FundamentalMatrix, ZeroCoefficientGivesIdentity) {
  auto a = [](double) { return Mat::Zero(3, 3); };
  const Mat phi = fundamental_matrix(a, 0.0, 1.0, 100);
  EXPECT_LT((phi - Mat::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(FundamentalMatrix, EmptyIntervalIsIdentityExactly) {
  auto a = [](double) { return Mat::Ones(2, 2); };
  const Mat phi = fundamental_matrix(a, 0.7, 0.7, 10);
  EXPECT_EQ(phi(0, 0), 1.0);
  EXPECT_EQ(phi(0, 1), 0.0);
}

TEST(FundamentalMatrix, ConstantCoefficientMatchesExpOracle) {
  Mat a(2, 2);
  a << 0.0, 1.0, -2.0, -3.0;
  auto coeff = [&a](double) { return a; };
  const Mat phi = fundamental_matrix(coeff, 0.0, 1.5, 3000);
  const Mat expected = expm_oracle(Mat(1.5 * a));
  EXPECT_LT((phi - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(FundamentalMatrix, ComplexConstantCoefficient) {
  CMat a(2, 2);
  a << Complex(0.0, 0.4), Complex(0.2, 0.0), Complex(0.0, -0.1), Complex(-0.3, 0.2);
  auto coeff = [&a](double) { return a; };
  const CMat phi = fundamental_matrix(coeff, 0.0, 1.0, 2000);
  const CMat expected = expm_oracle(a);
  EXPECT_LT((phi - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(FundamentalMatrix, GeneratorColumnsConserveMass) {
  Mat q(3, 3);
  q << -1.0, 0.9, 0.5, 0.1, -1.0, 0.5, 0.9, 0.1, -1.0;  // columns sum to zero
  auto coeff = [&q](double t) { return Mat((1.0 + 0.5 * std::sin(t)) * q); };
  auto grid = fundamental_matrix_grid(coeff, 0.0, 2.0, 800);
  for (int i = 0; i <= grid.steps(); i += 80) {
    const Vec sums = grid.node(i).colwise().sum();
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(sums[j], 1.0, 1e-9);
  }
}

TEST(FundamentalMatrix, BlockDiagonalFactorizes) {
  Mat a(2, 2);
  a << -0.3, 0.8, 0.1, -0.9;
  auto coeff_a = [&a](double t) { return Mat(std::cos(t) * a); };
  auto coeff_b = [&a](double t) {
    Mat b = Mat::Zero(4, 4);
    b.topLeftCorner(2, 2) = std::cos(t) * a;
    b.bottomRightCorner(2, 2) = std::cos(t) * a;
    return b;
  };
  const Mat phi_a = fundamental_matrix(coeff_a, 0.0, 1.0, 500);
  const Mat phi_b = fundamental_matrix(coeff_b, 0.0, 1.0, 500);
  EXPECT_LT((phi_b.topLeftCorner(2, 2) - phi_a).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((phi_b.bottomRightCorner(2, 2) - phi_a).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT(phi_b.topRightCorner(2, 2).cwiseAbs().maxCoeff(), 1e-15);
}
