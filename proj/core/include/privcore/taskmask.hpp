#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "privcore/dataset.hpp"
#include "privcore/gradtrace.hpp"
#include "privcore/privacy_select.hpp"

namespace privcore {

enum class Construction { kRandom, kMinNormCoarse, kMinNormFine, kFineMasking, kCoarseMasking };

std::string_view construction_name(Construction c);
std::optional<Construction> parse_construction(std::string_view name);
const std::vector<Construction>& all_constructions();

inline constexpr double kQuotientEpsilon = 1e-12;

// Per-example preference scores; lower is better.
struct ScoreVector {
  std::vector<double> scores;
  Construction construction = Construction::kRandom;
  double epsilon = kQuotientEpsilon;
};

// random: seeded uniform scores. min-norm-*: that task's trace.
// fine-masking: (coarse + eps) / (fine + eps), so bottom-k keeps rows that are
// hard for the fine task relative to the coarse one. coarse-masking: the
// reciprocal.
ScoreVector make_scores(const GradientTrace& trace_coarse, const GradientTrace& trace_fine,
                        Construction construction, std::uint64_t seed);

// floor(k / C) lowest scores in each fine class, then the k mod C remaining
// slots go to the globally lowest unselected scores, one extra per class at
// most. Ties go to the smaller index. Throws kInfeasible naming the first
// class that cannot supply its quota.
CoreSet class_balanced_select(std::span<const double> scores, std::span<const int> fine_labels,
                              int num_classes, std::size_t k, std::string parent_fingerprint = {});

struct TaskPairReport {
  std::string construction;
  std::size_t k = 0;
  double coarse_acc = 0.0;
  double fine_acc = 0.0;
  double gap = 0.0;  // coarse_acc - fine_acc
  std::vector<std::string> warnings;
  TrainConfig config;
};

// Trains a fresh classifier per task on the core-set rows of `train_data`
// and scores both on `test_set`. A core-set that misses a class entirely is
// still trained on; the omission is recorded in warnings.
TaskPairReport evaluate_coreset(const Dataset& train_data, const CoreSet& coreset,
                                const Dataset& test_set, const TrainConfig& config,
                                std::string construction_label = "custom", unsigned jobs = 1);

struct BucketResult {
  int bucket = 0;
  std::size_t size = 0;
  double mean_norm = 0.0;
  double coarse_acc = 0.0;
  double fine_acc = 0.0;
};

// Splits every fine class into num_buckets equal slices by ascending trace
// norm (bucket 0 = smallest norms) and trains one classifier per task on
// each class-balanced bucket.
std::vector<BucketResult> bucket_sweep(const Dataset& train_data, const Dataset& test_set,
                                       const GradientTrace& trace, int num_buckets,
                                       const TrainConfig& config, unsigned jobs = 1);

// Number of adjacent pairs where accuracy rises as bucket norm rises.
int count_inversions(std::span<const double> accuracy_by_bucket);

}  // namespace privcore
