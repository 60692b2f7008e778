#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "privcore/dataset.hpp"

namespace privcore {

enum class Task { kCoarse, kFine };

std::string_view task_name(Task task);
std::optional<Task> parse_task(std::string_view name);
Role task_role(Task task);

// Multinomial logistic regression. weights is C x (d + 1); the last column
// holds the class biases.
struct SoftmaxClassifier {
  Matrix weights;

  int num_classes() const { return static_cast<int>(weights.rows()); }
  Eigen::Index dim() const { return weights.cols() - 1; }

  Vector scores(const Eigen::Ref<const Vector>& x) const;
  Vector probabilities(const Eigen::Ref<const Vector>& x) const;
  // Argmax of the scores, ties to the lower class index.
  int predict(const Eigen::Ref<const Vector>& x) const;
};

struct TrainConfig {
  int epochs = 30;
  double learning_rate = 0.1;
  int batch_size = 32;
  std::uint64_t seed = 0;
  double l2 = 1e-4;

  bool operator==(const TrainConfig&) const = default;
};

// Mean over recorded epochs of each example's gradient norm.
struct GradientTrace {
  std::vector<double> per_example_avg_norm;
  Task task = Task::kFine;
  int epochs_recorded = 0;
};

struct TrainOptions {
  unsigned jobs = 1;
  // Train even if some class has no examples (otherwise kInvalidArgument).
  bool allow_missing_classes = false;
};

struct TrainResult {
  SoftmaxClassifier classifier;
  GradientTrace trace;
  // Regularised training objective before the first epoch and after each one.
  std::vector<double> objective_history;
};

// Mini-batch gradient descent on mean cross-entropy plus (l2 / 2)|W|^2 (bias
// column excluded), starting from zero weights. Batches follow a seeded
// reshuffle each epoch. After every epoch, each example's gradient norm is
// evaluated against the current weights and accumulated into the trace.
// Bit-deterministic for a given config and dataset.
TrainResult train(const Dataset& data, Task task, const TrainConfig& config,
                  const TrainOptions& options = {});

// Fraction of rows whose predicted class matches the task label.
double accuracy(const SoftmaxClassifier& classifier, const Dataset& data, Task task);

// Cross-entropy of one example.
double example_loss(const SoftmaxClassifier& classifier, const Eigen::Ref<const Vector>& x,
                    int label);
// Analytic per-example gradient (p - onehot) x~^T, shape C x (d + 1).
Matrix example_gradient(const SoftmaxClassifier& classifier, const Eigen::Ref<const Vector>& x,
                        int label);
// Frobenius norm of example_gradient in closed form: |p - onehot| * |x~|.
double example_gradient_norm(const SoftmaxClassifier& classifier,
                             const Eigen::Ref<const Vector>& x, int label);

double training_objective(const SoftmaxClassifier& classifier, const Dataset& data, Task task,
                          double l2);

}  // namespace privcore
