#pragma once

#include "privcore/linear_model.hpp"

namespace privcore {

// Condition number above which fit_ols switches to the ridge fallback.
inline constexpr double kRidgeConditionLimit = 1e12;

// Least squares with intercept via the normal equations of [X 1]. When the
// Gram matrix is singular or its condition number exceeds
// kRidgeConditionLimit, solves (G + lambda I) b = X'y with
// lambda = 1e-8 * trace(G) / (d + 1) and records it in the model.
// Throws kUnderdetermined when n <= d, kInvalidArgument on non-finite input.
LinearModel fit_ols(const Matrix& features, const Vector& target);

// Throws kInvalidArgument on dimension mismatch.
Vector predict(const LinearModel& model, const Matrix& features);

// 1 - SS_res / SS_tot with SS_tot centered on this target's own mean. Negative
// when the model does worse than that mean. Throws kUndefined when the target
// is constant.
double r_squared(const LinearModel& model, const Matrix& features, const Vector& target);

}  // namespace privcore
