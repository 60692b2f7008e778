#pragma once

#include <Eigen/Core>

namespace privcore {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Affine predictor weights·x + intercept for one continuous target.
struct LinearModel {
  Vector weights;
  double intercept = 0.0;
  // Set by fit_ols when the Gram matrix needed the ridge fallback.
  bool ridge_used = false;
  double ridge_lambda = 0.0;

  Eigen::Index dim() const { return weights.size(); }

  template <typename Row>
  double predict_row(const Row& x) const {
    return weights.dot(x) + intercept;
  }

  friend bool operator==(const LinearModel& a, const LinearModel& b) {
    return a.weights.size() == b.weights.size() && a.weights == b.weights &&
           a.intercept == b.intercept && a.ridge_used == b.ridge_used &&
           a.ridge_lambda == b.ridge_lambda;
  }
};

}  // namespace privcore
