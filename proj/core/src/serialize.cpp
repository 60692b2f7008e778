#include "privcore/serialize.hpp"

#include <charconv>

#include "privcore/csv.hpp"
#include "privcore/error.hpp"

namespace privcore {

namespace {

[[noreturn]] void bad_field(std::string_view field, std::string_view what) {
  throw Error(ErrorCode::kParse, "field '" + std::string(field) + "': " + std::string(what));
}

const Json& field(const Json& j, std::string_view name) {
  if (!j.is_object()) bad_field(name, "enclosing value is not an object");
  auto it = j.find(std::string(name));
  if (it == j.end()) bad_field(name, "missing");
  return *it;
}

template <typename T>
T get(const Json& j, std::string_view name) {
  const Json& v = field(j, name);
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception& e) {
    bad_field(name, e.what());
  }
}

double get_real(const Json& j, std::string_view name) {
  const Json& v = field(j, name);
  if (!v.is_number()) bad_field(name, "expected a number");
  return v.get<double>();
}

template <typename Parse>
auto get_enum(const Json& j, std::string_view name, Parse parse) {
  const auto text = get<std::string>(j, name);
  auto value = parse(text);
  if (!value) bad_field(name, "unknown value '" + text + "'");
  return *value;
}

}  // namespace

Json to_json(const LinearModel& model) {
  Json j;
  j["weights"] = std::vector<double>(model.weights.data(), model.weights.data() + model.weights.size());
  j["intercept"] = model.intercept;
  j["ridge_used"] = model.ridge_used;
  if (model.ridge_used) j["ridge_lambda"] = model.ridge_lambda;
  return j;
}

LinearModel linear_model_from_json(const Json& j) {
  LinearModel m;
  const auto weights = get<std::vector<double>>(j, "weights");
  if (weights.empty()) bad_field("weights", "empty");
  m.weights = Eigen::Map<const Vector>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  m.intercept = get_real(j, "intercept");
  m.ridge_used = j.contains("ridge_used") ? get<bool>(j, "ridge_used") : false;
  if (j.contains("ridge_lambda")) m.ridge_lambda = get_real(j, "ridge_lambda");
  return m;
}

Json to_json(const HierarchyConfig& c) {
  Json j;
  j["num_coarse"] = c.num_coarse;
  j["fine_per_coarse"] = c.fine_per_coarse;
  j["per_fine_count"] = c.per_fine_count;
  j["d"] = c.d;
  j["coarse_sep"] = c.coarse_sep;
  j["fine_sep"] = c.fine_sep;
  j["within_sd"] = c.within_sd;
  return j;
}

HierarchyConfig hierarchy_from_json(const Json& j) {
  HierarchyConfig c;
  c.num_coarse = get<int>(j, "num_coarse");
  c.fine_per_coarse = get<int>(j, "fine_per_coarse");
  c.per_fine_count = get<int>(j, "per_fine_count");
  c.d = get<int>(j, "d");
  c.coarse_sep = get_real(j, "coarse_sep");
  c.fine_sep = get_real(j, "fine_sep");
  c.within_sd = get_real(j, "within_sd");
  return c;
}

Json to_json(const GeneratorManifest& m) {
  Json j;
  j["kind"] = generator_kind_name(m.kind);
  j["seed"] = m.seed;
  j["n"] = m.n;
  j["d"] = m.d;
  if (m.true_y_model) j["true_y_model"] = to_json(*m.true_y_model);
  if (m.true_z_model) j["true_z_model"] = to_json(*m.true_z_model);
  if (m.noise_sd) j["noise_sd"] = *m.noise_sd;
  if (m.hierarchy) j["hierarchy"] = to_json(*m.hierarchy);
  if (m.mu) j["mu"] = *m.mu;
  if (m.sigma) j["sigma"] = *m.sigma;
  return j;
}

GeneratorManifest manifest_from_json(const Json& j) {
  GeneratorManifest m;
  m.kind = get_enum(j, "kind", parse_generator_kind);
  m.seed = get<std::uint64_t>(j, "seed");
  m.n = get<std::size_t>(j, "n");
  m.d = get<std::size_t>(j, "d");
  if (j.contains("true_y_model")) m.true_y_model = linear_model_from_json(j["true_y_model"]);
  if (j.contains("true_z_model")) m.true_z_model = linear_model_from_json(j["true_z_model"]);
  if (j.contains("noise_sd")) m.noise_sd = get_real(j, "noise_sd");
  if (j.contains("hierarchy")) m.hierarchy = hierarchy_from_json(j["hierarchy"]);
  if (j.contains("mu")) m.mu = get_real(j, "mu");
  if (j.contains("sigma")) m.sigma = get_real(j, "sigma");
  static const std::vector<std::string> kKnown = {
      "kind", "seed", "n", "d", "true_y_model", "true_z_model", "noise_sd", "hierarchy", "mu", "sigma"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) {
      bad_field(key, "unknown manifest field");
    }
  }
  return m;
}

Json to_json(const CoreSet& coreset) {
  Json j;
  j["parent_fingerprint"] = coreset.parent_fingerprint;
  j["k"] = coreset.k();
  j["indices"] = coreset.indices;
  return j;
}

CoreSet coreset_from_json(const Json& j) {
  CoreSet c;
  c.parent_fingerprint = get<std::string>(j, "parent_fingerprint");
  c.indices = get<std::vector<std::size_t>>(j, "indices");
  if (get<std::size_t>(j, "k") != c.indices.size()) bad_field("k", "does not match indices length");
  for (std::size_t i = 1; i < c.indices.size(); ++i) {
    if (c.indices[i] <= c.indices[i - 1]) bad_field("indices", "not strictly increasing");
  }
  return c;
}

Json to_json(const HideConfig& hide) {
  Json j;
  j["mode"] = hide_mode_name(hide.mode);
  j["alpha"] = hide.alpha;
  j["plant_label"] = plant_label_name(hide.plant_label);
  if (hide.plant_model) j["plant_model"] = to_json(*hide.plant_model);
  if (hide.z_center) j["z_center"] = *hide.z_center;
  return j;
}

HideConfig hide_config_from_json(const Json& j) {
  HideConfig h;
  h.mode = get_enum(j, "mode", parse_hide_mode);
  h.alpha = get_real(j, "alpha");
  h.plant_label = get_enum(j, "plant_label", parse_plant_label);
  if (j.contains("plant_model")) h.plant_model = linear_model_from_json(j["plant_model"]);
  if (j.contains("z_center")) h.z_center = get_real(j, "z_center");
  return h;
}

Json to_json(const TrainConfig& c) {
  Json j;
  j["epochs"] = c.epochs;
  j["learning_rate"] = c.learning_rate;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["l2"] = c.l2;
  return j;
}

TrainConfig train_config_from_json(const Json& j) {
  TrainConfig c;
  c.epochs = get<int>(j, "epochs");
  c.learning_rate = get_real(j, "learning_rate");
  c.batch_size = get<int>(j, "batch_size");
  c.seed = get<std::uint64_t>(j, "seed");
  c.l2 = get_real(j, "l2");
  return c;
}

Json to_json(const GradientTrace& trace, const TrainConfig& config) {
  Json j;
  j["task"] = task_name(trace.task);
  j["epochs_recorded"] = trace.epochs_recorded;
  j["config"] = to_json(config);
  j["per_example_avg_norm"] = trace.per_example_avg_norm;
  return j;
}

GradientTrace gradient_trace_from_json(const Json& j) {
  GradientTrace t;
  t.task = get_enum(j, "task", parse_task);
  t.epochs_recorded = get<int>(j, "epochs_recorded");
  t.per_example_avg_norm = get<std::vector<double>>(j, "per_example_avg_norm");
  for (double v : t.per_example_avg_norm) {
    if (!(v >= 0.0)) bad_field("per_example_avg_norm", "entries must be nonnegative");
  }
  return t;
}

Json to_json(const TaskPairReport& r) {
  Json j;
  j["construction"] = r.construction;
  j["k"] = r.k;
  j["coarse_acc"] = r.coarse_acc;
  j["fine_acc"] = r.fine_acc;
  j["gap"] = r.gap;
  j["config_echo"] = to_json(r.config);
  j["warnings"] = r.warnings;
  return j;
}

TaskPairReport task_pair_from_json(const Json& j) {
  TaskPairReport r;
  r.construction = get<std::string>(j, "construction");
  r.k = get<std::size_t>(j, "k");
  r.coarse_acc = get_real(j, "coarse_acc");
  r.fine_acc = get_real(j, "fine_acc");
  r.gap = get_real(j, "gap");
  r.config = train_config_from_json(field(j, "config_echo"));
  r.warnings = get<std::vector<std::string>>(j, "warnings");
  return r;
}

Json to_json(const BucketResult& b) {
  Json j;
  j["bucket"] = b.bucket;
  j["size"] = b.size;
  j["mean_norm"] = b.mean_norm;
  j["coarse_acc"] = b.coarse_acc;
  j["fine_acc"] = b.fine_acc;
  return j;
}

BucketResult bucket_from_json(const Json& j) {
  BucketResult b;
  b.bucket = get<int>(j, "bucket");
  b.size = get<std::size_t>(j, "size");
  b.mean_norm = get_real(j, "mean_norm");
  b.coarse_acc = get_real(j, "coarse_acc");
  b.fine_acc = get_real(j, "fine_acc");
  return b;
}

Json parse_json(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string(source) + ": " + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  return parse_json(read_text_file(path), path.string());
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_file_atomic(path, dump_json(j));
}

std::string series_to_csv(std::string_view value_name, const std::vector<double>& values) {
  std::string out = "index,";
  out += value_name;
  out += '\n';
  char buf[32];
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, values[i]);
    out.append(buf, ptr);
    out += '\n';
  }
  return out;
}

std::vector<double> series_from_csv(std::string_view text, std::string_view value_name,
                                    std::string_view source) {
  RoleOverrides roles;
  const Dataset table = parse_csv(text, roles, source);
  const auto& names = table.feature_names();
  auto find = [&](std::string_view name) -> Eigen::Index {
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (names[j] == name) return static_cast<Eigen::Index>(j);
    }
    throw Error(ErrorCode::kParse,
                std::string(source) + ": missing column '" + std::string(name) + "'");
  };
  const Eigen::Index index_col = find("index");
  const Eigen::Index value_col = find(value_name);
  std::vector<double> values(table.n());
  for (std::size_t r = 0; r < table.n(); ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    if (table.features()(row, index_col) != static_cast<double>(r)) {
      throw Error(ErrorCode::kParse, std::string(source) + ":" + std::to_string(r + 2) +
                                         ": index column must count 0, 1, 2, ...");
    }
    values[r] = table.features()(row, value_col);
  }
  return values;
}

}  // namespace privcore
