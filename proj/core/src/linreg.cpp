#include "privcore/linreg.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "privcore/error.hpp"

namespace privcore {

namespace {

double condition_number(const Matrix& gram) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double hi = eig.eigenvalues().maxCoeff();
  const double lo = eig.eigenvalues().minCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

LinearModel fit_ols(const Matrix& features, const Vector& target) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (target.size() != n) {
    throw_invalid("fit_ols: target length " + std::to_string(target.size()) +
                  " does not match " + std::to_string(n) + " rows");
  }
  if (d < 1) throw_invalid("fit_ols: need at least one feature");
  if (n <= d) {
    throw Error(ErrorCode::kUnderdetermined, "fit_ols: n=" + std::to_string(n) +
                                                 " rows cannot determine " +
                                                 std::to_string(d + 1) + " coefficients");
  }
  if (!features.allFinite() || !target.allFinite()) {
    throw_invalid("fit_ols: non-finite input");
  }

  Matrix augmented(n, d + 1);
  augmented.leftCols(d) = features;
  augmented.col(d).setOnes();

  Matrix gram = augmented.transpose() * augmented;
  const Vector rhs = augmented.transpose() * target;

  LinearModel model;
  if (condition_number(gram) > kRidgeConditionLimit) {
    model.ridge_used = true;
    model.ridge_lambda = 1e-8 * gram.trace() / static_cast<double>(d + 1);
    gram.diagonal().array() += model.ridge_lambda;
  }
  const Vector beta = gram.ldlt().solve(rhs);
  if (!beta.allFinite()) {
    throw Error(ErrorCode::kUnderdetermined, "fit_ols: normal equations have no finite solution");
  }
  model.weights = beta.head(d);
  model.intercept = beta[d];
  return model;
}

Vector predict(const LinearModel& model, const Matrix& features) {
  if (features.cols() != model.weights.size()) {
    throw_invalid("predict: model has " + std::to_string(model.weights.size()) +
                  " weights but features have " + std::to_string(features.cols()) + " columns");
  }
  return (features * model.weights).array() + model.intercept;
}

double r_squared(const LinearModel& model, const Matrix& features, const Vector& target) {
  if (target.size() != features.rows()) {
    throw_invalid("r_squared: target length does not match feature rows");
  }
  if (target.size() < 2 || target.minCoeff() == target.maxCoeff()) {
    throw Error(ErrorCode::kUndefined, "r_squared: target is constant");
  }
  const Vector predicted = predict(model, features);
  const double mean = target.mean();
  const double ss_tot = (target.array() - mean).square().sum();
  const double ss_res = (target - predicted).squaredNorm();
  return 1.0 - ss_res / ss_tot;
}

}  // namespace privcore
