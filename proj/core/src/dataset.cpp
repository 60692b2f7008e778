#include "privcore/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "privcore/csv.hpp"
#include "privcore/error.hpp"
#include "privcore/rng.hpp"

namespace privcore {

std::string_view role_name(Role role) {
  switch (role) {
    case Role::kY: return "y";
    case Role::kZ: return "z";
    case Role::kCoarse: return "coarse";
    case Role::kFine: return "fine";
  }
  return "?";
}

std::optional<Role> parse_role(std::string_view name) {
  if (name == "y") return Role::kY;
  if (name == "z") return Role::kZ;
  if (name == "coarse") return Role::kCoarse;
  if (name == "fine") return Role::kFine;
  return std::nullopt;
}

bool is_categorical(Role role) { return role == Role::kCoarse || role == Role::kFine; }

std::string_view generator_kind_name(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kLinearSynthetic: return "linear-synthetic";
    case GeneratorKind::kHierarchicalSynthetic: return "hierarchical-synthetic";
    case GeneratorKind::kNormalScalar: return "normal-scalar";
  }
  return "?";
}

std::optional<GeneratorKind> parse_generator_kind(std::string_view name) {
  if (name == "linear-synthetic") return GeneratorKind::kLinearSynthetic;
  if (name == "hierarchical-synthetic") return GeneratorKind::kHierarchicalSynthetic;
  if (name == "normal-scalar") return GeneratorKind::kNormalScalar;
  return std::nullopt;
}

Dataset::Dataset(Matrix features, std::vector<std::string> feature_names)
    : features_(std::move(features)), feature_names_(std::move(feature_names)) {
  if (features_.rows() < 1 || features_.cols() < 1) {
    throw_invalid("dataset needs n >= 1 and d >= 1");
  }
  if (feature_names_.empty()) {
    for (Eigen::Index j = 0; j < features_.cols(); ++j) {
      feature_names_.push_back("x" + std::to_string(j + 1));
    }
  }
  if (feature_names_.size() != d()) {
    throw_invalid("feature name count does not match feature columns");
  }
  for (Eigen::Index j = 0; j < features_.cols(); ++j) {
    for (Eigen::Index i = 0; i < features_.rows(); ++i) {
      if (!std::isfinite(features_(i, j))) {
        throw_invalid("non-finite feature at row " + std::to_string(i) + ", column '" +
                      feature_names_[j] + "'");
      }
    }
  }
  for (const auto& name : feature_names_) columns_.push_back({name, std::nullopt});
}

bool Dataset::has(Role role) const {
  switch (role) {
    case Role::kY: return y_.has_value();
    case Role::kZ: return z_.has_value();
    case Role::kCoarse: return coarse_.has_value();
    case Role::kFine: return fine_.has_value();
  }
  return false;
}

const Vector& Dataset::continuous(Role role) const {
  const std::optional<Vector>* slot = role == Role::kY ? &y_ : role == Role::kZ ? &z_ : nullptr;
  if (slot == nullptr || !slot->has_value()) {
    throw_invalid("dataset has no continuous column with role '" + std::string(role_name(role)) +
                  "'");
  }
  return **slot;
}

const CategoricalColumn& Dataset::categorical(Role role) const {
  const std::optional<CategoricalColumn>* slot =
      role == Role::kCoarse ? &coarse_ : role == Role::kFine ? &fine_ : nullptr;
  if (slot == nullptr || !slot->has_value()) {
    throw_invalid("dataset has no categorical column with role '" +
                  std::string(role_name(role)) + "'");
  }
  return **slot;
}

namespace {

void upsert_column(std::vector<ColumnSpec>& columns, Role role, std::string name) {
  if (name.empty()) name = std::string(role_name(role));
  for (auto& c : columns) {
    if (c.role == role) {
      c.name = std::move(name);
      return;
    }
  }
  columns.push_back({std::move(name), role});
}

}  // namespace

void Dataset::set_continuous(Role role, Vector values, std::string column_name) {
  if (is_categorical(role)) throw_invalid("role '" + std::string(role_name(role)) + "' is categorical");
  if (static_cast<std::size_t>(values.size()) != n()) {
    throw_invalid("column '" + std::string(role_name(role)) + "' has length " +
                  std::to_string(values.size()) + ", expected " + std::to_string(n()));
  }
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw_invalid("non-finite value in column '" + std::string(role_name(role)) + "' at row " +
                    std::to_string(i));
    }
  }
  (role == Role::kY ? y_ : z_) = std::move(values);
  upsert_column(columns_, role, std::move(column_name));
}

void Dataset::set_categorical(Role role, CategoricalColumn column, std::string column_name) {
  if (!is_categorical(role)) throw_invalid("role '" + std::string(role_name(role)) + "' is continuous");
  if (column.labels.size() != n()) {
    throw_invalid("column '" + std::string(role_name(role)) + "' has length " +
                  std::to_string(column.labels.size()) + ", expected " + std::to_string(n()));
  }
  for (std::size_t i = 0; i < column.labels.size(); ++i) {
    const int label = column.labels[i];
    if (label < 0 || label >= column.num_classes) {
      throw_invalid("label " + std::to_string(label) + " at row " + std::to_string(i) +
                    " outside [0, " + std::to_string(column.num_classes) + ")");
    }
  }
  (role == Role::kCoarse ? coarse_ : fine_) = std::move(column);
  upsert_column(columns_, role, std::move(column_name));
}

void Dataset::set_column_order(std::vector<ColumnSpec> order) {
  auto key = [](const ColumnSpec& c) { return std::make_pair(c.role.has_value(), c.name); };
  std::vector<std::pair<bool, std::string>> a, b;
  for (const auto& c : order) a.push_back(key(c));
  for (const auto& c : columns_) b.push_back(key(c));
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b || order.size() != columns_.size()) {
    throw_invalid("column order must be a permutation of the dataset columns");
  }
  columns_ = std::move(order);
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  if (rows.empty()) throw_invalid("subset needs at least one row");
  Matrix picked(static_cast<Eigen::Index>(rows.size()), features_.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= n()) {
      throw_invalid("row index " + std::to_string(rows[r]) + " out of range for n=" +
                    std::to_string(n()));
    }
    picked.row(static_cast<Eigen::Index>(r)) = features_.row(static_cast<Eigen::Index>(rows[r]));
  }
  Dataset out(std::move(picked), feature_names_);
  for (const auto& col : columns_) {
    if (!col.role) continue;
    const Role role = *col.role;
    if (is_categorical(role)) {
      const auto& src = categorical(role);
      CategoricalColumn dst{{}, src.num_classes};
      dst.labels.reserve(rows.size());
      for (std::size_t r : rows) dst.labels.push_back(src.labels[r]);
      out.set_categorical(role, std::move(dst), col.name);
    } else {
      const auto& src = continuous(role);
      Vector dst(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        dst[static_cast<Eigen::Index>(r)] = src[static_cast<Eigen::Index>(rows[r])];
      }
      out.set_continuous(role, std::move(dst), col.name);
    }
  }
  out.columns_ = columns_;
  return out;
}

std::string Dataset::fingerprint() const {
  const std::string text = to_csv_string(*this);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

bool operator==(const Dataset& a, const Dataset& b) {
  auto same_vec = [](const std::optional<Vector>& x, const std::optional<Vector>& y) {
    if (x.has_value() != y.has_value()) return false;
    return !x || (x->size() == y->size() && *x == *y);
  };
  auto same_cat = [](const std::optional<CategoricalColumn>& x,
                     const std::optional<CategoricalColumn>& y) {
    if (x.has_value() != y.has_value()) return false;
    return !x || (x->labels == y->labels && x->num_classes == y->num_classes);
  };
  return a.features_.rows() == b.features_.rows() && a.features_.cols() == b.features_.cols() &&
         a.features_ == b.features_ && a.feature_names_ == b.feature_names_ &&
         a.columns_ == b.columns_ && same_vec(a.y_, b.y_) && same_vec(a.z_, b.z_) &&
         same_cat(a.coarse_, b.coarse_) && same_cat(a.fine_, b.fine_) &&
         a.manifest_ == b.manifest_;
}

namespace {

LinearModel draw_model(Rng& rng, std::size_t d) {
  LinearModel m;
  m.weights.resize(static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j) m.weights[static_cast<Eigen::Index>(j)] = rng.normal();
  m.intercept = rng.normal();
  return m;
}

}  // namespace

Dataset gen_linear(std::uint64_t seed, std::size_t n, std::size_t d, double noise_sd) {
  if (n < 1) throw_invalid("gen_linear: n must be positive");
  if (d < 1) throw_invalid("gen_linear: d must be positive");
  if (!(noise_sd > 0.0) || !std::isfinite(noise_sd)) {
    throw_invalid("gen_linear: noise_sd must be positive");
  }

  Rng model_rng(derive_seed(seed, Stream::kTrueModels));
  LinearModel y_model = draw_model(model_rng, d);
  LinearModel z_model = draw_model(model_rng, d);

  Rng feature_rng(derive_seed(seed, Stream::kFeatures));
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      switch (j % 3) {
        case 0: x(i, j) = feature_rng.normal(); break;
        case 1: x(i, j) = feature_rng.uniform(-1.0, 1.0); break;
        default: x(i, j) = feature_rng.exponential(1.0); break;
      }
    }
  }

  Rng noise_rng(derive_seed(seed, Stream::kNoise));
  Vector y(x.rows());
  Vector z(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double ey = noise_rng.normal();
    const double ez = noise_rng.normal();
    y[i] = y_model.predict_row(x.row(i).transpose()) + noise_sd * ey;
    z[i] = z_model.predict_row(x.row(i).transpose()) + noise_sd * ez;
  }

  Dataset data(std::move(x), {});
  data.set_continuous(Role::kY, std::move(y));
  data.set_continuous(Role::kZ, std::move(z));

  GeneratorManifest manifest;
  manifest.kind = GeneratorKind::kLinearSynthetic;
  manifest.seed = seed;
  manifest.n = n;
  manifest.d = d;
  manifest.true_y_model = std::move(y_model);
  manifest.true_z_model = std::move(z_model);
  manifest.noise_sd = noise_sd;
  data.set_manifest(std::move(manifest));
  return data;
}

Dataset gen_hierarchical(std::uint64_t seed, const HierarchyConfig& config) {
  if (config.num_coarse < 1 || config.fine_per_coarse < 1 || config.per_fine_count < 1 ||
      config.d < 1) {
    throw_invalid("gen_hierarchical: all counts must be >= 1");
  }
  if (!(config.within_sd > 0.0) || !(config.fine_sep > 0.0) || !(config.coarse_sep > 0.0)) {
    throw_invalid("gen_hierarchical: separations and within_sd must be positive");
  }
  if (!(config.coarse_sep > config.fine_sep)) {
    throw_invalid("gen_hierarchical: coarse_sep must exceed fine_sep");
  }
  const int fine_axes = config.fine_per_coarse > 1 ? config.fine_per_coarse : 0;
  const int coarse_axes = config.num_coarse > 1 ? config.num_coarse : 0;
  if (config.d < coarse_axes + fine_axes) {
    throw_invalid("gen_hierarchical: d=" + std::to_string(config.d) + " cannot place " +
                  std::to_string(config.num_coarse) + " coarse and " +
                  std::to_string(config.fine_per_coarse) + " fine centers (need d >= " +
                  std::to_string(coarse_axes + fine_axes) + ")");
  }

  const int num_fine = config.num_fine();
  const std::size_t n = static_cast<std::size_t>(num_fine) * config.per_fine_count;
  const Eigen::Index d = config.d;

  // Unit axes scaled by sep/sqrt(2) give pairwise distance sep.
  const double coarse_scale = config.coarse_sep / std::sqrt(2.0);
  const double fine_scale = config.fine_sep / std::sqrt(2.0);

  // Each coarse group gets its own orthonormal fine directions inside the
  // complement of the coarse axes (Gram-Schmidt on Gaussian draws).
  Rng center_rng(derive_seed(seed, Stream::kClassCenters));
  const Eigen::Index free_dims = d - coarse_axes;
  std::vector<Vector> centers;
  centers.reserve(static_cast<std::size_t>(num_fine));
  for (int c = 0; c < config.num_coarse; ++c) {
    std::vector<Vector> basis;
    for (int f = 0; f < config.fine_per_coarse; ++f) {
      Vector center = Vector::Zero(d);
      if (coarse_axes > 0) center[c] = coarse_scale;
      if (fine_axes > 0) {
        Vector u(free_dims);
        double norm = 0.0;
        while (norm < 1e-6) {
          for (Eigen::Index j = 0; j < free_dims; ++j) u[j] = center_rng.normal();
          for (const Vector& b : basis) u -= u.dot(b) * b;
          norm = u.norm();
        }
        u /= norm;
        basis.push_back(u);
        center.tail(free_dims) += fine_scale * u;
      }
      centers.push_back(std::move(center));
    }
  }

  Rng rng(derive_seed(seed, Stream::kFeatures));
  Matrix x(static_cast<Eigen::Index>(n), d);
  CategoricalColumn coarse{{}, config.num_coarse};
  CategoricalColumn fine{{}, num_fine};
  coarse.labels.reserve(n);
  fine.labels.reserve(n);

  Eigen::Index row = 0;
  for (int c = 0; c < config.num_coarse; ++c) {
    for (int f = 0; f < config.fine_per_coarse; ++f) {
      const Vector& center = centers[static_cast<std::size_t>(c * config.fine_per_coarse + f)];
      for (int k = 0; k < config.per_fine_count; ++k, ++row) {
        for (Eigen::Index j = 0; j < d; ++j) {
          x(row, j) = center[j] + config.within_sd * rng.normal();
        }
        coarse.labels.push_back(c);
        fine.labels.push_back(c * config.fine_per_coarse + f);
      }
    }
  }

  Dataset data(std::move(x), {});
  data.set_categorical(Role::kCoarse, std::move(coarse));
  data.set_categorical(Role::kFine, std::move(fine));

  GeneratorManifest manifest;
  manifest.kind = GeneratorKind::kHierarchicalSynthetic;
  manifest.seed = seed;
  manifest.n = n;
  manifest.d = static_cast<std::size_t>(config.d);
  manifest.hierarchy = config;
  data.set_manifest(std::move(manifest));
  return data;
}

Dataset gen_normal_scalar(std::uint64_t seed, std::size_t n, double mu, double sigma) {
  if (n < 2) throw_invalid("gen_normal_scalar: n must be >= 2");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw_invalid("gen_normal_scalar: sigma must be positive");
  if (!std::isfinite(mu)) throw_invalid("gen_normal_scalar: mu must be finite");

  Rng rng(derive_seed(seed, Stream::kFeatures));
  Matrix x(static_cast<Eigen::Index>(n), 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, 0) = rng.normal(mu, sigma);

  Dataset data(std::move(x), {"x1"});
  GeneratorManifest manifest;
  manifest.kind = GeneratorKind::kNormalScalar;
  manifest.seed = seed;
  manifest.n = n;
  manifest.d = 1;
  manifest.mu = mu;
  manifest.sigma = sigma;
  data.set_manifest(std::move(manifest));
  return data;
}

Dataset regenerate(const GeneratorManifest& manifest) {
  switch (manifest.kind) {
    case GeneratorKind::kLinearSynthetic:
      if (!manifest.noise_sd) throw_invalid("linear manifest lacks noise_sd");
      return gen_linear(manifest.seed, manifest.n, manifest.d, *manifest.noise_sd);
    case GeneratorKind::kHierarchicalSynthetic:
      if (!manifest.hierarchy) throw_invalid("hierarchical manifest lacks hierarchy");
      return gen_hierarchical(manifest.seed, *manifest.hierarchy);
    case GeneratorKind::kNormalScalar:
      if (!manifest.mu || !manifest.sigma) throw_invalid("normal manifest lacks mu/sigma");
      return gen_normal_scalar(manifest.seed, manifest.n, *manifest.mu, *manifest.sigma);
  }
  throw_invalid("unknown generator kind");
}

namespace {

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = rng.uniform_index(i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

SplitRows stratified_split(const Dataset& data, Role stratify_by, double test_fraction,
                           std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw_invalid("test_fraction must lie in [0, 1)");
  }
  const auto& labels = data.categorical(stratify_by);
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(labels.num_classes));
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    by_class[static_cast<std::size_t>(labels.labels[i])].push_back(i);
  }
  Rng rng(derive_seed(seed, Stream::kSplit));
  SplitRows out;
  for (auto& members : by_class) {
    shuffle(members, rng);
    const auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(members.size())));
    out.test.insert(out.test.end(), members.begin(), members.begin() + n_test);
    out.train.insert(out.train.end(), members.begin() + n_test, members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

SplitRows random_split(std::size_t n, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw_invalid("test_fraction must lie in [0, 1)");
  }
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  Rng rng(derive_seed(seed, Stream::kSplit));
  shuffle(rows, rng);
  const auto n_test =
      static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  SplitRows out;
  out.test.assign(rows.begin(), rows.begin() + n_test);
  out.train.assign(rows.begin() + n_test, rows.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace privcore
