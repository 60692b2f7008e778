#include <gtest/gtest.h>

#include "error_code.hpp"
#include "oracles.hpp"
#include "privcore/dataset.hpp"
#include "privcore/linreg.hpp"
#include "privcore/rng.hpp"

namespace privcore {
namespace {

using testing::code_of;

TEST(FitOls, TwoPointLine) {
  Matrix x(2, 1);
  x << 0, 1;
  Vector y(2);
  y << 1, 3;
  const LinearModel m = fit_ols(x, y);
  EXPECT_NEAR(m.weights[0], 2.0, 1e-12);
  EXPECT_NEAR(m.intercept, 1.0, 1e-12);
  EXPECT_FALSE(m.ridge_used);
  EXPECT_EQ(code_of([&] { fit_ols(x.topRows(1), y.head(1)); }), ErrorCode::kUnderdetermined);
}

TEST(FitOls, ConstantTargetGivesZeroWeights) {
  const Dataset data = gen_linear(1, 30, 3, 0.5);
  const LinearModel m = fit_ols(data.features(), Vector::Constant(30, 4.0));
  EXPECT_LT(m.weights.norm(), 1e-10);
  EXPECT_NEAR(m.intercept, 4.0, 1e-10);
}

TEST(FitOls, RejectsBadInput) {
  Matrix x = Matrix::Random(10, 2);
  EXPECT_EQ(code_of([&] { fit_ols(x, Vector::Zero(9)); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { fit_ols(Matrix::Random(2, 2), Vector::Zero(2)); }),
            ErrorCode::kUnderdetermined);
  Vector y = Vector::Zero(10);
  y[3] = std::numeric_limits<double>::infinity();
  EXPECT_EQ(code_of([&] { fit_ols(x, y); }), ErrorCode::kInvalidArgument);
}

TEST(FitOls, MatchesGradientDescentOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const std::size_t d = 1 + rng.uniform_index(4);
    const std::size_t n = d + 5 + rng.uniform_index(50 - d - 5);
    const Dataset data = gen_linear(seed, n, d, 0.7);
    const Matrix& x = data.features();
    const Vector& y = data.continuous(Role::kY);
    const LinearModel closed = fit_ols(x, y);
    const LinearModel gd = oracle::gradient_descent_ols(x, y);
    EXPECT_NEAR(oracle::sum_squared_residuals(closed, x, y),
                oracle::sum_squared_residuals(gd, x, y), 1e-6)
        << "seed " << seed;
  }
}

TEST(FitOls, ResidualsAreOrthogonalToColumns) {
  const Dataset data = gen_linear(4, 200, 5, 0.5);
  const Vector& y = data.continuous(Role::kY);
  const LinearModel m = fit_ols(data.features(), y);
  const Vector r = y - predict(m, data.features());
  const double tol = 1e-8 * y.norm();
  EXPECT_LT(std::abs(r.sum()), tol);
  for (Eigen::Index j = 0; j < data.features().cols(); ++j) {
    EXPECT_LT(std::abs(data.features().col(j).dot(r)), tol * data.features().col(j).norm());
  }
}

TEST(FitOls, NoPerturbationImprovesRSquared) {
  const Dataset data = gen_linear(6, 100, 3, 0.5);
  const Vector& y = data.continuous(Role::kY);
  const LinearModel best = fit_ols(data.features(), y);
  const double r2 = r_squared(best, data.features(), y);
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    LinearModel p = best;
    for (Eigen::Index j = 0; j < p.weights.size(); ++j) p.weights[j] += 0.01 * rng.normal();
    p.intercept += 0.01 * rng.normal();
    EXPECT_LE(r_squared(p, data.features(), y), r2);
  }
}

TEST(FitOls, DuplicateColumnUsesRidgeFallback) {
  const Dataset data = gen_linear(2, 50, 2, 0.5);
  Matrix x(50, 3);
  x.leftCols(2) = data.features();
  x.col(2) = data.features().col(0);
  const Vector& y = data.continuous(Role::kY);
  const LinearModel m = fit_ols(x, y);
  EXPECT_TRUE(m.ridge_used);
  EXPECT_GT(m.ridge_lambda, 0.0);
  EXPECT_TRUE(m.weights.allFinite());
  const LinearModel plain = fit_ols(data.features(), y);
  EXPECT_NEAR(m.weights[0] + m.weights[2], plain.weights[0], 1e-4);
  EXPECT_NEAR(r_squared(m, x, y), r_squared(plain, data.features(), y), 1e-8);
}

TEST(Predict, AppliesWeightsAndChecksDimension) {
  LinearModel m;
  m.weights = Vector(2);
  m.weights << 1.0, -2.0;
  m.intercept = 0.5;
  Matrix x(2, 2);
  x << 1, 1, 3, 0;
  const Vector p = predict(m, x);
  EXPECT_DOUBLE_EQ(p[0], -0.5);
  EXPECT_DOUBLE_EQ(p[1], 3.5);
  EXPECT_EQ(code_of([&] { predict(m, Matrix::Zero(2, 3)); }), ErrorCode::kInvalidArgument);
}

TEST(RSquared, PerfectMeanAndUndefined) {
  Matrix x(4, 1);
  x << 0, 1, 2, 3;
  Vector y(4);
  y << 1, 3, 5, 7;
  LinearModel exact;
  exact.weights = Vector::Constant(1, 2.0);
  exact.intercept = 1.0;
  EXPECT_DOUBLE_EQ(r_squared(exact, x, y), 1.0);
  LinearModel mean;
  mean.weights = Vector::Zero(1);
  mean.intercept = 4.0;
  EXPECT_DOUBLE_EQ(r_squared(mean, x, y), 0.0);
  LinearModel bad = mean;
  bad.intercept = 100.0;
  EXPECT_LT(r_squared(bad, x, y), 0.0);
  EXPECT_EQ(code_of([&] { r_squared(exact, x, Vector::Constant(4, 2.0)); }), ErrorCode::kUndefined);
}

}  // namespace
}  // namespace privcore
