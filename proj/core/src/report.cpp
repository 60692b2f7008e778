#include "privcore/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "privcore/error.hpp"
#include "privcore/linreg.hpp"
#include "privcore/parallel.hpp"
#include "privcore/rng.hpp"

namespace privcore {

namespace {

double cosine(const Vector& a, const Vector& b) {
  const double denom = a.norm() * b.norm();
  return denom > 0.0 ? a.dot(b) / denom : 0.0;
}

Vector with_intercept(const LinearModel& m) {
  Vector v(m.weights.size() + 1);
  v.head(m.weights.size()) = m.weights;
  v[m.weights.size()] = m.intercept;
  return v;
}

double variance(const Vector& v) { return (v.array() - v.mean()).square().mean(); }

}  // namespace

Dataset linear_pipeline_dataset(const LinearPipelineConfig& config) {
  return gen_linear(config.seed, config.n, config.d, config.noise_sd);
}

LinearPipelineReport run_linear_pipeline(const LinearPipelineConfig& config, unsigned jobs) {
  if (!(config.holdout >= 0.0 && config.holdout < 1.0)) throw_invalid("holdout must lie in [0, 1)");
  const Dataset data = linear_pipeline_dataset(config);

  std::vector<std::size_t> work_rows;
  std::optional<Dataset> holdout;
  if (config.holdout > 0.0) {
    SplitRows split = random_split(data.n(), config.holdout, config.seed);
    if (split.test.size() < 2) throw_invalid("holdout leaves fewer than 2 evaluation rows");
    holdout = data.subset(split.test);
    work_rows = std::move(split.train);
  } else {
    work_rows.resize(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) work_rows[i] = i;
  }
  const Dataset work = holdout ? data.subset(work_rows) : data;
  if (config.k < 1 || config.k > work.n()) {
    throw_invalid("k=" + std::to_string(config.k) + " outside [1, " + std::to_string(work.n()) + "]");
  }

  LinearPipelineReport report;
  report.config = config;
  report.dataset_fingerprint = data.fingerprint();

  const Matrix& x = work.features();
  const Vector& y = work.continuous(Role::kY);
  const Vector& z = work.continuous(Role::kZ);
  report.y.true_model = *data.manifest()->true_y_model;
  report.z.true_model = *data.manifest()->true_z_model;
  report.y.full_fit = fit_ols(x, y);
  report.z.full_fit = fit_ols(x, z);

  HideConfig hide;
  hide.mode = config.mode;
  hide.alpha = config.alpha;
  hide.plant_label = config.plant_label;
  if (config.mode == HideMode::kPlant) {
    hide.plant_model = make_plant(derive_seed(config.seed, Stream::kPlant), config.d);
    report.plant = hide.plant_model;
  }
  if (config.mode == HideMode::kHideValue) {
    hide.z_center = z.mean();
    report.z_center = hide.z_center;
  }

  const std::vector<double> losses = point_losses(work, report.y.full_fit, hide, jobs);
  const CoreSet local = select_bottom_k(losses, config.k);
  report.coreset.parent_fingerprint = report.dataset_fingerprint;
  for (std::size_t i : local.indices) report.coreset.indices.push_back(work_rows[i]);

  const Dataset core = work.subset(local.indices);
  const Matrix& cx = core.features();
  report.y.coreset_fit = fit_ols(cx, core.continuous(Role::kY));
  report.z.coreset_fit = fit_ols(cx, core.continuous(Role::kZ));

  for (auto [fit, role] : {std::pair{&report.y, Role::kY}, std::pair{&report.z, Role::kZ}}) {
    const Vector& target = work.continuous(role);
    fit->r2_full_on_full = r_squared(fit->full_fit, x, target);
    fit->r2_coreset_on_coreset = r_squared(fit->coreset_fit, cx, core.continuous(role));
    fit->r2_coreset_model_on_full = r_squared(fit->coreset_fit, x, target);
    if (holdout) {
      const Vector& held = holdout->continuous(role);
      fit->r2_full_on_holdout = r_squared(fit->full_fit, holdout->features(), held);
      fit->r2_coreset_model_on_holdout = r_squared(fit->coreset_fit, holdout->features(), held);
    }
  }

  if (report.plant) {
    report.plant_cosine = cosine(report.z.coreset_fit.weights, report.plant->weights);
    report.plant_cosine_with_intercept =
        cosine(with_intercept(report.z.coreset_fit), with_intercept(*report.plant));
  }
  report.z_variance_full = variance(z);
  report.z_variance_coreset = variance(core.continuous(Role::kZ));

  report.notes.push_back(config.holdout > 0.0
                             ? "r2 'full' values use the non-held-out rows; holdout r2 reported separately"
                             : "r2 evaluated on the generated dataset itself (no held-out split)");
  if (config.mode == HideMode::kHideValue) {
    report.notes.push_back("z_center is the sample mean of z over the selection rows");
  }
  if (config.mode == HideMode::kPlant) {
    report.notes.push_back(config.plant_label == PlantLabel::kSecret
                               ? "plant residual measured against the secret column z"
                               : "plant residual measured against the public column y");
  }
  report.notes.push_back(
      "core-set r2 of each target is reported both on the core-set and on the full data");
  return report;
}

MaskPipelineReport run_mask_pipeline(const MaskPipelineConfig& config, unsigned jobs,
                                     MaskArtifacts* artifacts) {
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0)) {
    throw_invalid("test_fraction must lie in (0, 1)");
  }
  const Dataset data = gen_hierarchical(config.seed, config.hierarchy);
  const SplitRows split = stratified_split(data, Role::kFine, config.test_fraction, config.seed);
  if (split.test.empty()) throw_invalid("test split is empty");
  Dataset train_data = data.subset(split.train);
  Dataset test_data = data.subset(split.test);

  TrainConfig tc = config.train;
  tc.seed = config.seed;
  const TrainOptions options{jobs, false};
  TrainResult coarse = train(train_data, Task::kCoarse, tc, options);
  TrainResult fine = train(train_data, Task::kFine, tc, options);

  MaskPipelineReport report;
  report.config = config;
  report.config.train = tc;
  report.dataset_fingerprint = data.fingerprint();
  report.n_train = train_data.n();
  report.n_test = test_data.n();
  report.full_coarse_acc = accuracy(coarse.classifier, test_data, Task::kCoarse);
  report.full_fine_acc = accuracy(fine.classifier, test_data, Task::kFine);

  const auto& fine_labels = train_data.categorical(Role::kFine);
  for (Construction c : config.constructions) {
    const ScoreVector scores = make_scores(coarse.trace, fine.trace, c, config.seed);
    const CoreSet coreset = class_balanced_select(scores.scores, fine_labels.labels,
                                                  fine_labels.num_classes, config.k,
                                                  report.dataset_fingerprint);
    report.rows.push_back(evaluate_coreset(train_data, coreset, test_data, tc,
                                           std::string(construction_name(c)), jobs));
  }
  if (config.buckets > 0) {
    const GradientTrace& trace = config.bucket_task == Task::kCoarse ? coarse.trace : fine.trace;
    report.buckets = bucket_sweep(train_data, test_data, trace, config.buckets, tc, jobs);
  }

  std::vector<std::size_t> order(report.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.rows[a].gap > report.rows[b].gap;
  });
  for (std::size_t i : order) report.ranking.push_back(report.rows[i].construction);

  report.notes.push_back("classifier: multinomial logistic regression on the raw features");
  report.notes.push_back(
      "gradient norm: Frobenius norm of the per-example weight gradient, sampled at each epoch end");
  report.notes.push_back("coarse and fine traces come from two independent trainings");
  report.notes.push_back(
      "every construction, including random, is class-balanced under the fine labels");

  if (artifacts != nullptr) {
    artifacts->train = std::move(train_data);
    artifacts->test = std::move(test_data);
    artifacts->coarse = std::move(coarse);
    artifacts->fine = std::move(fine);
  }
  return report;
}

double median(std::vector<double> values) { return quartiles(std::move(values)).median; }

Quartiles quartiles(std::vector<double> values) {
  if (values.empty()) throw_invalid("quartiles of an empty sample");
  std::sort(values.begin(), values.end());
  auto at = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {at(0.25), at(0.5), at(0.75)};
}

const MetricSummary& MultiSeedReport::metric(const std::string& name) const {
  for (const auto& m : metrics) {
    if (m.name == name) return m;
  }
  throw_invalid("report has no metric '" + name + "'");
}

std::vector<std::pair<std::string, double>> linear_metrics(const LinearPipelineReport& r) {
  std::vector<std::pair<std::string, double>> m;
  for (auto [fit, tag] : {std::pair{&r.y, "y"}, std::pair{&r.z, "z"}}) {
    const std::string t = tag;
    m.emplace_back("r2_full_on_full_" + t, fit->r2_full_on_full);
    m.emplace_back("r2_coreset_on_coreset_" + t, fit->r2_coreset_on_coreset);
    m.emplace_back("r2_coreset_model_on_full_" + t, fit->r2_coreset_model_on_full);
    if (fit->r2_full_on_holdout) m.emplace_back("r2_full_on_holdout_" + t, *fit->r2_full_on_holdout);
    if (fit->r2_coreset_model_on_holdout) {
      m.emplace_back("r2_coreset_model_on_holdout_" + t, *fit->r2_coreset_model_on_holdout);
    }
  }
  m.emplace_back("y_full_r2_shift", std::abs(r.y.r2_coreset_model_on_full - r.y.r2_full_on_full));
  if (r.plant_cosine) m.emplace_back("plant_cosine", *r.plant_cosine);
  if (r.plant_cosine_with_intercept) {
    m.emplace_back("plant_cosine_with_intercept", *r.plant_cosine_with_intercept);
  }
  m.emplace_back("z_variance_full", r.z_variance_full);
  m.emplace_back("z_variance_coreset", r.z_variance_coreset);
  return m;
}

std::vector<std::pair<std::string, double>> mask_metrics(const MaskPipelineReport& r) {
  std::vector<std::pair<std::string, double>> m;
  m.emplace_back("full.coarse_acc", r.full_coarse_acc);
  m.emplace_back("full.fine_acc", r.full_fine_acc);
  for (const auto& row : r.rows) {
    m.emplace_back(row.construction + ".coarse_acc", row.coarse_acc);
    m.emplace_back(row.construction + ".fine_acc", row.fine_acc);
    m.emplace_back(row.construction + ".gap", row.gap);
  }
  for (const auto& b : r.buckets) {
    const std::string tag = "bucket" + std::to_string(b.bucket);
    m.emplace_back(tag + ".mean_norm", b.mean_norm);
    m.emplace_back(tag + ".coarse_acc", b.coarse_acc);
    m.emplace_back(tag + ".fine_acc", b.fine_acc);
  }
  return m;
}

namespace {

MultiSeedReport summarise(std::string kind, std::uint64_t root, Json config,
                          const std::vector<std::vector<std::pair<std::string, double>>>& runs) {
  MultiSeedReport out;
  out.kind = std::move(kind);
  out.root_seed = root;
  out.seeds = runs.size();
  out.config = std::move(config);
  // Metric order follows the first run; a metric absent from any run is dropped.
  if (runs.empty()) return out;
  for (const auto& [name, value] : runs.front()) {
    MetricSummary s;
    s.name = name;
    bool everywhere = true;
    for (const auto& run : runs) {
      auto it = std::find_if(run.begin(), run.end(), [&](const auto& p) { return p.first == name; });
      if (it == run.end()) {
        everywhere = false;
        break;
      }
      s.per_seed.push_back(it->second);
    }
    if (!everywhere) continue;
    s.stats = quartiles(s.per_seed);
    out.metrics.push_back(std::move(s));
  }
  return out;
}

}  // namespace

MultiSeedReport run_linear_multi(const LinearPipelineConfig& config, std::size_t seeds,
                                 unsigned jobs) {
  if (seeds < 1) throw_invalid("need at least one seed");
  std::vector<std::vector<std::pair<std::string, double>>> runs(seeds);
  parallel_for(seeds, jobs, [&](std::size_t i) {
    LinearPipelineConfig c = config;
    c.seed = config.seed + i;
    runs[i] = linear_metrics(run_linear_pipeline(c));
  });
  return summarise("linear-multi", config.seed, to_json(config), runs);
}

MultiSeedReport run_mask_multi(const MaskPipelineConfig& config, std::size_t seeds,
                               unsigned jobs) {
  if (seeds < 1) throw_invalid("need at least one seed");
  std::vector<std::vector<std::pair<std::string, double>>> runs(seeds);
  parallel_for(seeds, jobs, [&](std::size_t i) {
    MaskPipelineConfig c = config;
    c.seed = config.seed + i;
    runs[i] = mask_metrics(run_mask_pipeline(c));
  });
  return summarise("mask-multi", config.seed, to_json(config), runs);
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void bad(std::string_view what) { throw Error(ErrorCode::kParse, std::string(what)); }

const Json& req(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <typename T>
T as(const Json& j, const char* key) {
  try {
    return req(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("field '") + key + "': " + e.what());
  }
}

std::optional<double> opt_real(const Json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  return as<double>(j, key);
}

Json header(const char* type) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["report_type"] = type;
  return j;
}

void check_header(const Json& j, std::string_view type) {
  if (as<int>(j, "schema_version") != kReportSchemaVersion) bad("unsupported schema_version");
  if (as<std::string>(j, "report_type") != type) {
    bad("expected report_type '" + std::string(type) + "'");
  }
}

Json fit_json(const TargetFit& f) {
  Json j;
  j["true_model"] = to_json(f.true_model);
  j["full_fit"] = to_json(f.full_fit);
  j["coreset_fit"] = to_json(f.coreset_fit);
  j["r2_full_on_full"] = f.r2_full_on_full;
  j["r2_coreset_on_coreset"] = f.r2_coreset_on_coreset;
  j["r2_coreset_model_on_full"] = f.r2_coreset_model_on_full;
  if (f.r2_full_on_holdout) j["r2_full_on_holdout"] = *f.r2_full_on_holdout;
  if (f.r2_coreset_model_on_holdout) j["r2_coreset_model_on_holdout"] = *f.r2_coreset_model_on_holdout;
  return j;
}

TargetFit fit_from_json(const Json& j) {
  TargetFit f;
  f.true_model = linear_model_from_json(req(j, "true_model"));
  f.full_fit = linear_model_from_json(req(j, "full_fit"));
  f.coreset_fit = linear_model_from_json(req(j, "coreset_fit"));
  f.r2_full_on_full = as<double>(j, "r2_full_on_full");
  f.r2_coreset_on_coreset = as<double>(j, "r2_coreset_on_coreset");
  f.r2_coreset_model_on_full = as<double>(j, "r2_coreset_model_on_full");
  f.r2_full_on_holdout = opt_real(j, "r2_full_on_holdout");
  f.r2_coreset_model_on_holdout = opt_real(j, "r2_coreset_model_on_holdout");
  return f;
}

template <typename Parse>
auto as_enum(const Json& j, const char* key, Parse parse) {
  const auto text = as<std::string>(j, key);
  auto v = parse(text);
  if (!v) bad(std::string("field '") + key + "': unknown value '" + text + "'");
  return *v;
}

}  // namespace

Json to_json(const LinearPipelineConfig& c) {
  Json j;
  j["seed"] = c.seed;
  j["n"] = c.n;
  j["d"] = c.d;
  j["noise_sd"] = c.noise_sd;
  j["k"] = c.k;
  j["mode"] = hide_mode_name(c.mode);
  j["alpha"] = c.alpha;
  j["plant_label"] = plant_label_name(c.plant_label);
  j["holdout"] = c.holdout;
  return j;
}

LinearPipelineConfig linear_config_from_json(const Json& j) {
  LinearPipelineConfig c;
  c.seed = as<std::uint64_t>(j, "seed");
  c.n = as<std::size_t>(j, "n");
  c.d = as<std::size_t>(j, "d");
  c.noise_sd = as<double>(j, "noise_sd");
  c.k = as<std::size_t>(j, "k");
  c.mode = as_enum(j, "mode", parse_hide_mode);
  c.alpha = as<double>(j, "alpha");
  c.plant_label = as_enum(j, "plant_label", parse_plant_label);
  c.holdout = as<double>(j, "holdout");
  return c;
}

Json to_json(const MaskPipelineConfig& c) {
  Json j;
  j["seed"] = c.seed;
  j["hierarchy"] = to_json(c.hierarchy);
  j["test_fraction"] = c.test_fraction;
  j["k"] = c.k;
  Json names = Json::array();
  for (Construction con : c.constructions) names.push_back(construction_name(con));
  j["constructions"] = names;
  j["train"] = to_json(c.train);
  j["buckets"] = c.buckets;
  j["bucket_task"] = task_name(c.bucket_task);
  return j;
}

MaskPipelineConfig mask_config_from_json(const Json& j) {
  MaskPipelineConfig c;
  c.seed = as<std::uint64_t>(j, "seed");
  c.hierarchy = hierarchy_from_json(req(j, "hierarchy"));
  c.test_fraction = as<double>(j, "test_fraction");
  c.k = as<std::size_t>(j, "k");
  c.constructions.clear();
  for (const auto& name : as<std::vector<std::string>>(j, "constructions")) {
    auto con = parse_construction(name);
    if (!con) bad("unknown construction '" + name + "'");
    c.constructions.push_back(*con);
  }
  c.train = train_config_from_json(req(j, "train"));
  c.buckets = as<int>(j, "buckets");
  c.bucket_task = as_enum(j, "bucket_task", parse_task);
  return c;
}

Json to_json(const LinearPipelineReport& r) {
  Json j = header("linear-pipeline");
  j["config"] = to_json(r.config);
  j["dataset_fingerprint"] = r.dataset_fingerprint;
  j["targets"]["y"] = fit_json(r.y);
  j["targets"]["z"] = fit_json(r.z);
  if (r.plant) j["plant"] = to_json(*r.plant);
  if (r.z_center) j["z_center"] = *r.z_center;
  if (r.plant_cosine) j["plant_cosine"] = *r.plant_cosine;
  if (r.plant_cosine_with_intercept) j["plant_cosine_with_intercept"] = *r.plant_cosine_with_intercept;
  j["z_variance_full"] = r.z_variance_full;
  j["z_variance_coreset"] = r.z_variance_coreset;
  j["coreset"] = to_json(r.coreset);
  j["notes"] = r.notes;
  return j;
}

LinearPipelineReport linear_report_from_json(const Json& j) {
  check_header(j, "linear-pipeline");
  LinearPipelineReport r;
  r.config = linear_config_from_json(req(j, "config"));
  r.dataset_fingerprint = as<std::string>(j, "dataset_fingerprint");
  r.y = fit_from_json(req(req(j, "targets"), "y"));
  r.z = fit_from_json(req(req(j, "targets"), "z"));
  if (j.contains("plant")) r.plant = linear_model_from_json(j.at("plant"));
  r.z_center = opt_real(j, "z_center");
  r.plant_cosine = opt_real(j, "plant_cosine");
  r.plant_cosine_with_intercept = opt_real(j, "plant_cosine_with_intercept");
  r.z_variance_full = as<double>(j, "z_variance_full");
  r.z_variance_coreset = as<double>(j, "z_variance_coreset");
  r.coreset = coreset_from_json(req(j, "coreset"));
  r.notes = as<std::vector<std::string>>(j, "notes");
  return r;
}

Json to_json(const MaskPipelineReport& r) {
  Json j = header("mask-pipeline");
  j["config"] = to_json(r.config);
  j["dataset_fingerprint"] = r.dataset_fingerprint;
  j["n_train"] = r.n_train;
  j["n_test"] = r.n_test;
  j["full_coarse_acc"] = r.full_coarse_acc;
  j["full_fine_acc"] = r.full_fine_acc;
  Json rows = Json::array();
  for (const auto& row : r.rows) rows.push_back(to_json(row));
  j["rows"] = rows;
  Json buckets = Json::array();
  for (const auto& b : r.buckets) buckets.push_back(to_json(b));
  j["buckets"] = buckets;
  j["ranking"] = r.ranking;
  j["notes"] = r.notes;
  return j;
}

MaskPipelineReport mask_report_from_json(const Json& j) {
  check_header(j, "mask-pipeline");
  MaskPipelineReport r;
  r.config = mask_config_from_json(req(j, "config"));
  r.dataset_fingerprint = as<std::string>(j, "dataset_fingerprint");
  r.n_train = as<std::size_t>(j, "n_train");
  r.n_test = as<std::size_t>(j, "n_test");
  r.full_coarse_acc = as<double>(j, "full_coarse_acc");
  r.full_fine_acc = as<double>(j, "full_fine_acc");
  for (const auto& row : req(j, "rows")) r.rows.push_back(task_pair_from_json(row));
  for (const auto& b : req(j, "buckets")) r.buckets.push_back(bucket_from_json(b));
  r.ranking = as<std::vector<std::string>>(j, "ranking");
  r.notes = as<std::vector<std::string>>(j, "notes");
  return r;
}

Json to_json(const MultiSeedReport& r) {
  Json j = header(r.kind == "mask-multi" ? "mask-multi" : "linear-multi");
  j["root_seed"] = r.root_seed;
  j["seeds"] = r.seeds;
  j["config"] = r.config;
  Json metrics = Json::array();
  for (const auto& m : r.metrics) {
    Json e;
    e["name"] = m.name;
    e["q1"] = m.stats.q1;
    e["median"] = m.stats.median;
    e["q3"] = m.stats.q3;
    e["per_seed"] = m.per_seed;
    metrics.push_back(e);
  }
  j["metrics"] = metrics;
  return j;
}

MultiSeedReport multi_report_from_json(const Json& j) {
  MultiSeedReport r;
  r.kind = as<std::string>(j, "report_type");
  if (r.kind != "linear-multi" && r.kind != "mask-multi") bad("not a multi-seed report");
  check_header(j, r.kind);
  r.root_seed = as<std::uint64_t>(j, "root_seed");
  r.seeds = as<std::size_t>(j, "seeds");
  r.config = req(j, "config");
  for (const auto& e : req(j, "metrics")) {
    MetricSummary m;
    m.name = as<std::string>(e, "name");
    m.stats = {as<double>(e, "q1"), as<double>(e, "median"), as<double>(e, "q3")};
    m.per_seed = as<std::vector<double>>(e, "per_seed");
    r.metrics.push_back(std::move(m));
  }
  return r;
}

Json task_pair_document(const TaskPairReport& report) {
  Json j = header("task-pair");
  const Json body = to_json(report);
  for (const auto& [key, value] : body.items()) j[key] = value;
  return j;
}

// ---------------------------------------------------------------------------
// Text
// ---------------------------------------------------------------------------

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::string out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string line;
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (c > 0) line += " | ";
      line += c + 1 == rows[r].size() ? rows[r][c] : pad(rows[r][c], widths[c]);
    }
    out += line + "\n";
    if (r == 0) {
      std::string rule;
      for (std::size_t c = 0; c < widths.size(); ++c) {
        if (c > 0) rule += "-+-";
        rule.append(widths[c], '-');
      }
      out += rule + "\n";
    }
  }
  return out;
}

}  // namespace

std::string format_model(const LinearModel& model, const std::vector<std::string>& names) {
  std::string out = fmt("%.3g", model.intercept);
  for (Eigen::Index j = 0; j < model.weights.size(); ++j) {
    const double w = model.weights[j];
    out += w < 0 ? " - " : " + ";
    out += fmt("%.3g", std::abs(w));
    out += ' ';
    out += static_cast<std::size_t>(j) < names.size() ? names[static_cast<std::size_t>(j)]
                                                       : "x" + std::to_string(j + 1);
  }
  return out;
}

std::string render_text(const LinearPipelineReport& r) {
  auto pair = [](double a, double b) { return "(" + fmt("%.4f", a) + ", " + fmt("%.4f", b) + ")"; };
  std::vector<std::vector<std::string>> rows = {
      {"Data", "y", "z"},
      {"True values", format_model(r.y.true_model), format_model(r.z.true_model)},
      {"Full dataset", format_model(r.y.full_fit), format_model(r.z.full_fit)},
      {"  (r2)", "(" + fmt("%.4f", r.y.r2_full_on_full) + ")", "(" + fmt("%.4f", r.z.r2_full_on_full) + ")"},
      {"Core-set", format_model(r.y.coreset_fit), format_model(r.z.coreset_fit)},
      {"  (r2 coreset, r2 full)", pair(r.y.r2_coreset_on_coreset, r.y.r2_coreset_model_on_full),
       pair(r.z.r2_coreset_on_coreset, r.z.r2_coreset_model_on_full)},
  };
  if (r.y.r2_full_on_holdout) {
    rows.push_back({"  (r2 holdout: full, core-set)",
                    pair(*r.y.r2_full_on_holdout, *r.y.r2_coreset_model_on_holdout),
                    pair(*r.z.r2_full_on_holdout, *r.z.r2_coreset_model_on_holdout)});
  }
  std::string out = "Linear core-set pipeline: seed=" + std::to_string(r.config.seed) +
                    " n=" + std::to_string(r.config.n) + " k=" + std::to_string(r.config.k) +
                    " mode=" + std::string(hide_mode_name(r.config.mode)) +
                    " alpha=" + fmt("%g", r.config.alpha) + "\n\n";
  out += table(rows);
  out += "\n";
  if (r.plant) {
    out += "Planted model: z' = " + format_model(*r.plant) + "\n";
    out += "Cosine(core-set z fit, plant): " + fmt("%.4f", *r.plant_cosine) + " (weights), " +
           fmt("%.4f", *r.plant_cosine_with_intercept) + " (with intercept)\n";
  }
  if (r.z_center) out += "Hide-value center: " + fmt("%.6g", *r.z_center) + "\n";
  out += "z variance: full " + fmt("%.4f", r.z_variance_full) + ", core-set " +
         fmt("%.4f", r.z_variance_coreset) + "\n";
  for (const auto& note : r.notes) out += "note: " + note + "\n";
  return out;
}

std::string render_text(const MaskPipelineReport& r) {
  auto pct = [](double v) { return fmt("%.2f", 100.0 * v); };
  std::vector<std::vector<std::string>> rows = {
      {"Core-set (k=" + std::to_string(r.config.k) + ")", "Coarse (%)", "Fine (%)", "Gap"}};
  for (const auto& row : r.rows) {
    rows.push_back({row.construction, pct(row.coarse_acc), pct(row.fine_acc), pct(row.gap)});
  }
  std::string out = table(rows);
  if (r.n_train == 0) return out;
  out += "Full training set (" + std::to_string(r.n_train) + " rows): coarse " +
         pct(r.full_coarse_acc) + "%, fine " + pct(r.full_fine_acc) + "% on " +
         std::to_string(r.n_test) + " test rows\n";
  if (!r.buckets.empty()) {
    std::vector<std::vector<std::string>> b = {
        {"Bucket", "Size", "Mean norm", "Coarse (%)", "Fine (%)"}};
    for (const auto& bucket : r.buckets) {
      b.push_back({std::to_string(bucket.bucket), std::to_string(bucket.size),
                   fmt("%.4f", bucket.mean_norm), pct(bucket.coarse_acc), pct(bucket.fine_acc)});
    }
    out += "\n" + table(b);
  }
  if (!r.ranking.empty()) {
    out += "\nRanking by gap:";
    for (const auto& name : r.ranking) out += " " + name;
    out += "\n";
  }
  for (const auto& row : r.rows) {
    for (const auto& w : row.warnings) out += "warning (" + row.construction + "): " + w + "\n";
  }
  for (const auto& note : r.notes) out += "note: " + note + "\n";
  return out;
}

std::string render_text(const MultiSeedReport& r) {
  std::vector<std::vector<std::string>> rows = {{"Metric", "Q1", "Median", "Q3"}};
  for (const auto& m : r.metrics) {
    rows.push_back({m.name, fmt("%.4f", m.stats.q1), fmt("%.4f", m.stats.median),
                    fmt("%.4f", m.stats.q3)});
  }
  return r.kind + ": seeds " + std::to_string(r.root_seed) + ".." +
         std::to_string(r.root_seed + r.seeds - (r.seeds > 0 ? 1 : 0)) + "\n\n" + table(rows);
}

std::string render_text(const TaskPairReport& r) {
  std::string out = table({{"Core-set (k=" + std::to_string(r.k) + ")", "Coarse (%)", "Fine (%)", "Gap"},
                           {r.construction, fmt("%.2f", 100 * r.coarse_acc),
                            fmt("%.2f", 100 * r.fine_acc), fmt("%.2f", 100 * r.gap)}});
  for (const auto& w : r.warnings) out += "warning: " + w + "\n";
  return out;
}

std::string render_text(const Json& document) {
  const auto type = as<std::string>(document, "report_type");
  if (type == "linear-pipeline") return render_text(linear_report_from_json(document));
  if (type == "mask-pipeline") return render_text(mask_report_from_json(document));
  if (type == "linear-multi" || type == "mask-multi") {
    return render_text(multi_report_from_json(document));
  }
  if (type == "task-pair") {
    check_header(document, "task-pair");
    return render_text(task_pair_from_json(document));
  }
  bad("unknown report_type '" + type + "'");
}

}  // namespace privcore
