#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "privcore/linear_model.hpp"

namespace privcore {

// Label column roles. Continuous: y (public), z (secret). Categorical: coarse, fine.
enum class Role { kY, kZ, kCoarse, kFine };

std::string_view role_name(Role role);
std::optional<Role> parse_role(std::string_view name);
bool is_categorical(Role role);

struct CategoricalColumn {
  std::vector<int> labels;
  int num_classes = 0;
};

enum class GeneratorKind { kLinearSynthetic, kHierarchicalSynthetic, kNormalScalar };

std::string_view generator_kind_name(GeneratorKind kind);
std::optional<GeneratorKind> parse_generator_kind(std::string_view name);

struct HierarchyConfig {
  int num_coarse = 5;
  int fine_per_coarse = 4;
  int per_fine_count = 100;
  int d = 16;
  double coarse_sep = 3.0;
  double fine_sep = 2.0;
  double within_sd = 1.0;

  int num_fine() const { return num_coarse * fine_per_coarse; }
  bool operator==(const HierarchyConfig&) const = default;
};

// Everything needed to regenerate a synthetic dataset bit-for-bit.
struct GeneratorManifest {
  GeneratorKind kind = GeneratorKind::kLinearSynthetic;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t d = 0;
  std::optional<LinearModel> true_y_model;
  std::optional<LinearModel> true_z_model;
  std::optional<double> noise_sd;
  std::optional<HierarchyConfig> hierarchy;
  std::optional<double> mu;
  std::optional<double> sigma;

  bool operator==(const GeneratorManifest&) const = default;
};

// Column of a dataset in file order. A column is either a feature (role
// empty) or carries one of the label roles.
struct ColumnSpec {
  std::string name;
  std::optional<Role> role;

  bool operator==(const ColumnSpec&) const = default;
};

// n x d feature matrix plus optional label columns. Built once by a generator
// or the CSV reader and treated as read-only afterwards.
class Dataset {
 public:
  // Throws kInvalidArgument when n or d is zero or a feature is non-finite.
  Dataset(Matrix features, std::vector<std::string> feature_names);

  std::size_t n() const { return static_cast<std::size_t>(features_.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(features_.cols()); }
  const Matrix& features() const { return features_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<ColumnSpec>& columns() const { return columns_; }

  bool has(Role role) const;
  // Throw kInvalidArgument when the role is absent or of the other kind.
  const Vector& continuous(Role role) const;
  const CategoricalColumn& categorical(Role role) const;

  // Column name defaults to the role name.
  void set_continuous(Role role, Vector values, std::string column_name = {});
  void set_categorical(Role role, CategoricalColumn column, std::string column_name = {});

  // Reorders columns for file output; must be a permutation of columns().
  void set_column_order(std::vector<ColumnSpec> order);

  const std::optional<GeneratorManifest>& manifest() const { return manifest_; }
  void set_manifest(std::optional<GeneratorManifest> manifest) { manifest_ = std::move(manifest); }

  // Rows in the given order. Labels keep their class counts; manifest is dropped.
  Dataset subset(std::span<const std::size_t> rows) const;

  // FNV-1a 64 over the canonical CSV rendering, as 16 hex digits.
  std::string fingerprint() const;

  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  Matrix features_;
  std::vector<std::string> feature_names_;
  std::vector<ColumnSpec> columns_;
  std::optional<Vector> y_;
  std::optional<Vector> z_;
  std::optional<CategoricalColumn> coarse_;
  std::optional<CategoricalColumn> fine_;
  std::optional<GeneratorManifest> manifest_;
};

// Features x_j drawn from N(0,1), Uniform(-1,1), Exp(1) for j mod 3 = 0, 1, 2.
// y = w.x + w0 + e_y and z = v.x + v0 + e_z with e ~ N(0, noise_sd^2) and all
// coefficients N(0,1). Stream usage: kTrueModels draws w, w0, v, v0 in that
// order; kFeatures fills rows in row-major order; kNoise draws (e_y, e_z) per row.
Dataset gen_linear(std::uint64_t seed, std::size_t n, std::size_t d, double noise_sd);

// Gaussian classes with a two-level label hierarchy. Coarse centers sit on the
// first num_coarse axes, pairwise coarse_sep apart. Each coarse group draws its
// own orthonormal fine directions in the remaining d - num_coarse dimensions,
// giving fine centers pairwise fine_sep apart within the group.
// Rows are emitted class-major; fine label = coarse * fine_per_coarse + f.
Dataset gen_hierarchical(std::uint64_t seed, const HierarchyConfig& config);

// Single feature column "x1" of i.i.d. N(mu, sigma^2) draws.
Dataset gen_normal_scalar(std::uint64_t seed, std::size_t n, double mu, double sigma);

// Reruns the generator recorded in the manifest.
Dataset regenerate(const GeneratorManifest& manifest);

// Fine-label-stratified split: within each fine class a seeded shuffle sends
// round(test_fraction * count) rows to the test side. Returns {train, test}
// row lists, each sorted ascending.
struct SplitRows {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
SplitRows stratified_split(const Dataset& data, Role stratify_by, double test_fraction,
                           std::uint64_t seed);
SplitRows random_split(std::size_t n, double test_fraction, std::uint64_t seed);

}  // namespace privcore
