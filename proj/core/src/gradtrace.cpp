#include "privcore/gradtrace.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "privcore/error.hpp"
#include "privcore/parallel.hpp"
#include "privcore/rng.hpp"

namespace privcore {

std::string_view task_name(Task task) { return task == Task::kCoarse ? "coarse" : "fine"; }

std::optional<Task> parse_task(std::string_view name) {
  if (name == "coarse") return Task::kCoarse;
  if (name == "fine") return Task::kFine;
  return std::nullopt;
}

Role task_role(Task task) { return task == Task::kCoarse ? Role::kCoarse : Role::kFine; }

Vector SoftmaxClassifier::scores(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != dim()) {
    throw_invalid("classifier expects " + std::to_string(dim()) + " features, got " +
                  std::to_string(x.size()));
  }
  return weights.leftCols(dim()) * x + weights.col(dim());
}

Vector SoftmaxClassifier::probabilities(const Eigen::Ref<const Vector>& x) const {
  Vector s = scores(x);
  s.array() -= s.maxCoeff();
  s = s.array().exp();
  return s / s.sum();
}

int SoftmaxClassifier::predict(const Eigen::Ref<const Vector>& x) const {
  const Vector s = scores(x);
  int best = 0;
  for (int c = 1; c < s.size(); ++c) {
    if (s[c] > s[best]) best = c;
  }
  return best;
}

double example_loss(const SoftmaxClassifier& classifier, const Eigen::Ref<const Vector>& x,
                    int label) {
  Vector s = classifier.scores(x);
  const double top = s.maxCoeff();
  const double log_sum = top + std::log((s.array() - top).exp().sum());
  return log_sum - s[label];
}

Matrix example_gradient(const SoftmaxClassifier& classifier, const Eigen::Ref<const Vector>& x,
                        int label) {
  Vector residual = classifier.probabilities(x);
  residual[label] -= 1.0;
  Vector augmented(x.size() + 1);
  augmented.head(x.size()) = x;
  augmented[x.size()] = 1.0;
  return residual * augmented.transpose();
}

double example_gradient_norm(const SoftmaxClassifier& classifier,
                             const Eigen::Ref<const Vector>& x, int label) {
  Vector residual = classifier.probabilities(x);
  residual[label] -= 1.0;
  return residual.norm() * std::sqrt(x.squaredNorm() + 1.0);
}

double training_objective(const SoftmaxClassifier& classifier, const Dataset& data, Task task,
                          double l2) {
  const auto& labels = data.categorical(task_role(task)).labels;
  const Matrix& x = data.features();
  double total = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    total += example_loss(classifier, x.row(static_cast<Eigen::Index>(i)).transpose(), labels[i]);
  }
  const double penalty =
      0.5 * l2 * classifier.weights.leftCols(classifier.dim()).squaredNorm();
  return total / static_cast<double>(data.n()) + penalty;
}

TrainResult train(const Dataset& data, Task task, const TrainConfig& config,
                  const TrainOptions& options) {
  if (config.epochs < 1) throw_invalid("epochs must be >= 1");
  if (!(config.learning_rate > 0.0)) throw_invalid("learning_rate must be positive");
  if (config.batch_size < 1) throw_invalid("batch_size must be >= 1");
  if (!(config.l2 >= 0.0)) throw_invalid("l2 must be nonnegative");

  const auto& column = data.categorical(task_role(task));
  const int num_classes = column.num_classes;
  if (!options.allow_missing_classes) {
    std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
    for (int label : column.labels) ++counts[static_cast<std::size_t>(label)];
    for (int c = 0; c < num_classes; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) {
        throw_invalid(std::string(task_name(task)) + " class " + std::to_string(c) +
                      " has no examples");
      }
    }
  }

  const std::size_t n = data.n();
  const Eigen::Index d = static_cast<Eigen::Index>(data.d());
  Matrix augmented(static_cast<Eigen::Index>(n), d + 1);
  augmented.leftCols(d) = data.features();
  augmented.col(d).setOnes();

  TrainResult result;
  SoftmaxClassifier& model = result.classifier;
  model.weights = Matrix::Zero(num_classes, d + 1);

  std::vector<double> norm_sum(n, 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(derive_seed(config.seed, Stream::kShuffle));

  result.objective_history.push_back(training_objective(model, data, task, config.l2));

  const auto batch = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.uniform_index(i)]);
    }
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      const auto rows = static_cast<Eigen::Index>(stop - start);
      Matrix xb(rows, d + 1);
      for (Eigen::Index r = 0; r < rows; ++r) {
        xb.row(r) = augmented.row(static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(r)]));
      }
      // rows x C probabilities, minus one-hot targets.
      Matrix residual = xb * model.weights.transpose();
      for (Eigen::Index r = 0; r < rows; ++r) {
        auto s = residual.row(r);
        s.array() -= s.maxCoeff();
        s = s.array().exp().matrix();
        s /= s.sum();
        s[column.labels[order[start + static_cast<std::size_t>(r)]]] -= 1.0;
      }
      Matrix grad = residual.transpose() * xb / static_cast<double>(rows);
      grad.leftCols(d) += config.l2 * model.weights.leftCols(d);
      model.weights -= config.learning_rate * grad;
    }

    std::vector<double> norms(n);
    parallel_for(n, options.jobs, [&](std::size_t i) {
      norms[i] = example_gradient_norm(
          model, data.features().row(static_cast<Eigen::Index>(i)).transpose(), column.labels[i]);
    });
    for (std::size_t i = 0; i < n; ++i) norm_sum[i] += norms[i];
    result.objective_history.push_back(training_objective(model, data, task, config.l2));
  }

  if (!model.weights.allFinite()) {
    throw_invalid("training diverged; lower the learning rate");
  }

  result.trace.task = task;
  result.trace.epochs_recorded = config.epochs;
  result.trace.per_example_avg_norm.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.trace.per_example_avg_norm[i] = norm_sum[i] / static_cast<double>(config.epochs);
  }
  return result;
}

double accuracy(const SoftmaxClassifier& classifier, const Dataset& data, Task task) {
  const auto& labels = data.categorical(task_role(task)).labels;
  if (static_cast<Eigen::Index>(data.d()) != classifier.dim()) {
    throw_invalid("accuracy: classifier dimension does not match dataset");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (classifier.predict(data.features().row(static_cast<Eigen::Index>(i)).transpose()) ==
        labels[i]) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(data.n());
}

}  // namespace privcore
