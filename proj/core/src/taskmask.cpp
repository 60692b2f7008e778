#include "privcore/taskmask.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "privcore/error.hpp"
#include "privcore/rng.hpp"

namespace privcore {

std::string_view construction_name(Construction c) {
  switch (c) {
    case Construction::kRandom: return "random";
    case Construction::kMinNormCoarse: return "min-norm-coarse";
    case Construction::kMinNormFine: return "min-norm-fine";
    case Construction::kFineMasking: return "fine-masking";
    case Construction::kCoarseMasking: return "coarse-masking";
  }
  return "?";
}

std::optional<Construction> parse_construction(std::string_view name) {
  for (Construction c : all_constructions()) {
    if (construction_name(c) == name) return c;
  }
  return std::nullopt;
}

const std::vector<Construction>& all_constructions() {
  static const std::vector<Construction> kAll = {
      Construction::kRandom, Construction::kMinNormFine, Construction::kMinNormCoarse,
      Construction::kFineMasking, Construction::kCoarseMasking};
  return kAll;
}

ScoreVector make_scores(const GradientTrace& trace_coarse, const GradientTrace& trace_fine,
                        Construction construction, std::uint64_t seed) {
  const auto& coarse = trace_coarse.per_example_avg_norm;
  const auto& fine = trace_fine.per_example_avg_norm;
  if (coarse.size() != fine.size()) {
    throw_invalid("traces have different lengths (" + std::to_string(coarse.size()) + " vs " +
                  std::to_string(fine.size()) + ")");
  }
  ScoreVector out;
  out.construction = construction;
  out.scores.resize(coarse.size());
  const double eps = out.epsilon;
  switch (construction) {
    case Construction::kRandom: {
      Rng rng(derive_seed(seed, Stream::kRandomScores));
      for (double& s : out.scores) s = rng.uniform01();
      break;
    }
    case Construction::kMinNormCoarse:
      out.scores = coarse;
      break;
    case Construction::kMinNormFine:
      out.scores = fine;
      break;
    // Masking a task means preferring rows whose norm on that task is large
    // relative to the other task's, so its quotient sits in the denominator.
    case Construction::kFineMasking:
      for (std::size_t i = 0; i < out.scores.size(); ++i) {
        out.scores[i] = (coarse[i] + eps) / (fine[i] + eps);
      }
      break;
    case Construction::kCoarseMasking:
      for (std::size_t i = 0; i < out.scores.size(); ++i) {
        out.scores[i] = (fine[i] + eps) / (coarse[i] + eps);
      }
      break;
  }
  for (std::size_t i = 0; i < out.scores.size(); ++i) {
    if (!std::isfinite(out.scores[i])) {
      throw_invalid("non-finite score at row " + std::to_string(i));
    }
  }
  return out;
}

CoreSet class_balanced_select(std::span<const double> scores, std::span<const int> fine_labels,
                              int num_classes, std::size_t k, std::string parent_fingerprint) {
  const std::size_t n = scores.size();
  if (fine_labels.size() != n) throw_invalid("scores and labels differ in length");
  if (num_classes < 1) throw_invalid("num_classes must be >= 1");
  if (k < 1 || k > n) {
    throw_invalid("k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }

  auto before = [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b] || (scores[a] == scores[b] && a < b);
  };

  const auto classes = static_cast<std::size_t>(num_classes);
  std::vector<std::vector<std::size_t>> members(classes);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = fine_labels[i];
    if (label < 0 || label >= num_classes) {
      throw_invalid("fine label " + std::to_string(label) + " at row " + std::to_string(i) +
                    " outside [0, " + std::to_string(num_classes) + ")");
    }
    members[static_cast<std::size_t>(label)].push_back(i);
  }

  const std::size_t quota = k / classes;
  const std::size_t remainder = k % classes;
  for (std::size_t c = 0; c < classes; ++c) {
    if (members[c].size() < quota) {
      throw Error(ErrorCode::kInfeasible,
                  "fine class " + std::to_string(c) + " has " + std::to_string(members[c].size()) +
                      " examples, needs " + std::to_string(quota) + " for k=" + std::to_string(k));
    }
  }

  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  std::vector<std::size_t> next_candidates;  // each class's best unselected row
  for (std::size_t c = 0; c < classes; ++c) {
    auto& m = members[c];
    std::sort(m.begin(), m.end(), before);
    chosen.insert(chosen.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(quota));
    if (m.size() > quota) next_candidates.push_back(m[quota]);
  }

  // Scanning unselected rows in global score order, the first row met from a
  // class is that class's best remaining one, so only those rows can win.
  if (remainder > 0) {
    if (next_candidates.size() < remainder) {
      throw Error(ErrorCode::kInfeasible,
                  "only " + std::to_string(next_candidates.size()) +
                      " classes can take an extra example; need " + std::to_string(remainder));
    }
    std::sort(next_candidates.begin(), next_candidates.end(), before);
    chosen.insert(chosen.end(), next_candidates.begin(),
                  next_candidates.begin() + static_cast<std::ptrdiff_t>(remainder));
  }

  std::sort(chosen.begin(), chosen.end());
  return CoreSet{std::move(parent_fingerprint), std::move(chosen)};
}

namespace {

std::vector<std::string> missing_class_warnings(const Dataset& subset) {
  std::vector<std::string> warnings;
  for (Role role : {Role::kCoarse, Role::kFine}) {
    const auto& col = subset.categorical(role);
    std::vector<int> counts(static_cast<std::size_t>(col.num_classes), 0);
    for (int label : col.labels) ++counts[static_cast<std::size_t>(label)];
    for (int c = 0; c < col.num_classes; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) {
        warnings.push_back("core-set has no examples of " + std::string(role_name(role)) +
                           " class " + std::to_string(c));
      }
    }
  }
  return warnings;
}

}  // namespace

TaskPairReport evaluate_coreset(const Dataset& train_data, const CoreSet& coreset,
                                const Dataset& test_set, const TrainConfig& config,
                                std::string construction_label, unsigned jobs) {
  if (coreset.indices.empty()) throw_invalid("core-set is empty");
  if (test_set.d() != train_data.d()) throw_invalid("test set dimension differs from training data");
  for (std::size_t i = 0; i < coreset.indices.size(); ++i) {
    if (coreset.indices[i] >= train_data.n()) {
      throw_invalid("core-set index " + std::to_string(coreset.indices[i]) + " out of range");
    }
    if (i > 0 && coreset.indices[i] <= coreset.indices[i - 1]) {
      throw_invalid("core-set indices must be strictly increasing");
    }
  }

  const Dataset subset = train_data.subset(coreset.indices);
  TaskPairReport report;
  report.construction = std::move(construction_label);
  report.k = coreset.k();
  report.config = config;
  report.warnings = missing_class_warnings(subset);

  const TrainOptions options{jobs, true};
  const TrainResult coarse = train(subset, Task::kCoarse, config, options);
  const TrainResult fine = train(subset, Task::kFine, config, options);
  report.coarse_acc = accuracy(coarse.classifier, test_set, Task::kCoarse);
  report.fine_acc = accuracy(fine.classifier, test_set, Task::kFine);
  report.gap = report.coarse_acc - report.fine_acc;
  return report;
}

std::vector<BucketResult> bucket_sweep(const Dataset& train_data, const Dataset& test_set,
                                       const GradientTrace& trace, int num_buckets,
                                       const TrainConfig& config, unsigned jobs) {
  const auto& norms = trace.per_example_avg_norm;
  if (norms.size() != train_data.n()) throw_invalid("trace length does not match dataset");
  if (num_buckets < 1) throw_invalid("num_buckets must be >= 1");

  const auto& fine = train_data.categorical(Role::kFine);
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(fine.num_classes));
  for (std::size_t i = 0; i < fine.labels.size(); ++i) {
    members[static_cast<std::size_t>(fine.labels[i])].push_back(i);
  }
  const auto buckets = static_cast<std::size_t>(num_buckets);
  std::vector<std::vector<std::size_t>> rows(buckets);
  for (auto& m : members) {
    std::sort(m.begin(), m.end(), [&](std::size_t a, std::size_t b) {
      return norms[a] < norms[b] || (norms[a] == norms[b] && a < b);
    });
    for (std::size_t b = 0; b < buckets; ++b) {
      const std::size_t lo = b * m.size() / buckets;
      const std::size_t hi = (b + 1) * m.size() / buckets;
      rows[b].insert(rows[b].end(), m.begin() + static_cast<std::ptrdiff_t>(lo),
                     m.begin() + static_cast<std::ptrdiff_t>(hi));
    }
  }

  std::vector<BucketResult> out;
  for (std::size_t b = 0; b < buckets; ++b) {
    auto& r = rows[b];
    if (r.empty()) throw_invalid("bucket " + std::to_string(b) + " is empty");
    std::sort(r.begin(), r.end());
    BucketResult result;
    result.bucket = static_cast<int>(b);
    result.size = r.size();
    double sum = 0.0;
    for (std::size_t i : r) sum += norms[i];
    result.mean_norm = sum / static_cast<double>(r.size());
    const TaskPairReport eval =
        evaluate_coreset(train_data, CoreSet{{}, r}, test_set, config, "bucket", jobs);
    result.coarse_acc = eval.coarse_acc;
    result.fine_acc = eval.fine_acc;
    out.push_back(result);
  }
  return out;
}

int count_inversions(std::span<const double> accuracy_by_bucket) {
  int inversions = 0;
  for (std::size_t b = 1; b < accuracy_by_bucket.size(); ++b) {
    if (accuracy_by_bucket[b] > accuracy_by_bucket[b - 1]) ++inversions;
  }
  return inversions;
}

}  // namespace privcore
