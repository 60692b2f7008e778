#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "privcore/dataset.hpp"
#include "privcore/gradtrace.hpp"
#include "privcore/privacy_select.hpp"
#include "privcore/serialize.hpp"
#include "privcore/taskmask.hpp"

namespace privcore {

inline constexpr int kReportSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Linear regression pipeline: generate, fit y, score points, take bottom-k,
// refit both targets on the core-set, and evaluate.
// ---------------------------------------------------------------------------

struct LinearPipelineConfig {
  std::uint64_t seed = 0;
  std::size_t n = 1000;
  std::size_t d = 3;
  double noise_sd = 0.5;
  std::size_t k = 50;
  HideMode mode = HideMode::kPlant;
  double alpha = 1.0;
  PlantLabel plant_label = PlantLabel::kSecret;
  // Fraction of rows held out from selection and fitting; 0 disables.
  double holdout = 0.0;

  bool operator==(const LinearPipelineConfig&) const = default;
};

struct TargetFit {
  LinearModel true_model;
  LinearModel full_fit;
  LinearModel coreset_fit;
  double r2_full_on_full = 0.0;
  double r2_coreset_on_coreset = 0.0;
  double r2_coreset_model_on_full = 0.0;
  std::optional<double> r2_full_on_holdout;
  std::optional<double> r2_coreset_model_on_holdout;
};

struct LinearPipelineReport {
  LinearPipelineConfig config;
  std::string dataset_fingerprint;
  TargetFit y;
  TargetFit z;
  std::optional<LinearModel> plant;
  std::optional<double> z_center;
  // Cosine between the core-set z fit and the plant, weights only and with
  // the intercept appended. Present in plant mode.
  std::optional<double> plant_cosine;
  std::optional<double> plant_cosine_with_intercept;
  double z_variance_full = 0.0;
  double z_variance_coreset = 0.0;
  CoreSet coreset;
  std::vector<std::string> notes;
};

LinearPipelineReport run_linear_pipeline(const LinearPipelineConfig& config, unsigned jobs = 1);

// Dataset the pipeline for `config` generates (for exporting series).
Dataset linear_pipeline_dataset(const LinearPipelineConfig& config);

// ---------------------------------------------------------------------------
// Classifier masking pipeline on the hierarchical generator.
// ---------------------------------------------------------------------------

struct MaskPipelineConfig {
  std::uint64_t seed = 0;
  HierarchyConfig hierarchy;
  double test_fraction = 0.2;
  std::size_t k = 100;
  std::vector<Construction> constructions = all_constructions();
  TrainConfig train;  // train.seed is replaced by the root seed
  int buckets = 5;    // 0 skips the bucket sweep
  Task bucket_task = Task::kFine;

  bool operator==(const MaskPipelineConfig&) const = default;
};

struct MaskPipelineReport {
  MaskPipelineConfig config;
  std::string dataset_fingerprint;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double full_coarse_acc = 0.0;
  double full_fine_acc = 0.0;
  std::vector<TaskPairReport> rows;
  std::vector<BucketResult> buckets;
  std::vector<std::string> ranking;  // constructions by decreasing gap
  std::vector<std::string> notes;
};

struct MaskArtifacts {
  std::optional<Dataset> train;
  std::optional<Dataset> test;
  TrainResult coarse;
  TrainResult fine;
};

MaskPipelineReport run_mask_pipeline(const MaskPipelineConfig& config, unsigned jobs = 1,
                                     MaskArtifacts* artifacts = nullptr);

// ---------------------------------------------------------------------------
// Multi-seed drivers: seeds root, root+1, ..., root+count-1.
// ---------------------------------------------------------------------------

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};
// Linear interpolation between order statistics (type 7).
Quartiles quartiles(std::vector<double> values);
double median(std::vector<double> values);

struct MetricSummary {
  std::string name;
  Quartiles stats;
  std::vector<double> per_seed;
};

struct MultiSeedReport {
  std::string kind;  // "linear-multi" or "mask-multi"
  std::uint64_t root_seed = 0;
  std::size_t seeds = 0;
  Json config;
  std::vector<MetricSummary> metrics;

  const MetricSummary& metric(const std::string& name) const;
};

// Named scalar metrics of one run, in a fixed order.
std::vector<std::pair<std::string, double>> linear_metrics(const LinearPipelineReport& report);
std::vector<std::pair<std::string, double>> mask_metrics(const MaskPipelineReport& report);

// Seeds run concurrently when jobs > 1; results do not depend on jobs.
MultiSeedReport run_linear_multi(const LinearPipelineConfig& config, std::size_t seeds,
                                 unsigned jobs = 1);
MultiSeedReport run_mask_multi(const MaskPipelineConfig& config, std::size_t seeds,
                               unsigned jobs = 1);

// ---------------------------------------------------------------------------
// Rendering. Every JSON document carries schema_version and report_type.
// ---------------------------------------------------------------------------

Json to_json(const LinearPipelineConfig& config);
LinearPipelineConfig linear_config_from_json(const Json& j);
Json to_json(const MaskPipelineConfig& config);
MaskPipelineConfig mask_config_from_json(const Json& j);

Json to_json(const LinearPipelineReport& report);
LinearPipelineReport linear_report_from_json(const Json& j);
Json to_json(const MaskPipelineReport& report);
MaskPipelineReport mask_report_from_json(const Json& j);
Json to_json(const MultiSeedReport& report);
MultiSeedReport multi_report_from_json(const Json& j);
// Single evaluate_coreset result wrapped with schema_version/report_type.
Json task_pair_document(const TaskPairReport& report);

std::string render_text(const LinearPipelineReport& report);
std::string render_text(const MaskPipelineReport& report);
std::string render_text(const MultiSeedReport& report);
std::string render_text(const TaskPairReport& report);
// Dispatches on report_type.
std::string render_text(const Json& document);

// "-0.886 - 1.05 x1 - 1.31 x2" style, three significant digits.
std::string format_model(const LinearModel& model, const std::vector<std::string>& names = {});

}  // namespace privcore
