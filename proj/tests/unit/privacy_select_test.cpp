#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "error_code.hpp"
#include "oracles.hpp"
#include "privcore/linreg.hpp"
#include "privcore/privacy_select.hpp"
#include "privcore/rng.hpp"

namespace privcore {
namespace {

using testing::code_of;

Dataset one_row(double x, double y, double z) {
  Matrix m(1, 1);
  m << x;
  Dataset data(m, {});
  data.set_continuous(Role::kY, Vector::Constant(1, y));
  data.set_continuous(Role::kZ, Vector::Constant(1, z));
  return data;
}

LinearModel line(double w, double b) {
  LinearModel m;
  m.weights = Vector::Constant(1, w);
  m.intercept = b;
  return m;
}

TEST(PointLosses, HandComputedHideValue) {
  const Dataset data = one_row(1.0, 2.0, 5.0);
  HideConfig hide;
  hide.mode = HideMode::kHideValue;
  hide.alpha = 2.0;
  hide.z_center = 4.0;
  // (2 - 1)^2 + 2 * (5 - 4)^2
  EXPECT_DOUBLE_EQ(point_losses(data, line(1.0, 0.0), hide)[0], 3.0);
}

TEST(PointLosses, ZeroOnExactLineAndAtCenter) {
  Matrix x(3, 1);
  x << 0, 1, 2;
  Dataset data(x, {});
  data.set_continuous(Role::kY, (Vector(3) << 1, 3, 5).finished());
  data.set_continuous(Role::kZ, Vector::Constant(3, 7.0));
  HideConfig none;
  for (double v : point_losses(data, line(2.0, 1.0), none)) EXPECT_EQ(v, 0.0);
  HideConfig hide;
  hide.mode = HideMode::kHideValue;
  for (double v : hide_terms(data, hide)) EXPECT_EQ(v, 0.0);
}

TEST(PointLosses, PlantLabelSelectsColumn) {
  const Dataset data = one_row(1.0, 2.0, 5.0);
  HideConfig hide;
  hide.mode = HideMode::kPlant;
  hide.plant_model = line(1.0, 1.0);
  EXPECT_DOUBLE_EQ(hide_terms(data, hide)[0], 9.0);
  hide.plant_label = PlantLabel::kLiteralPublic;
  EXPECT_DOUBLE_EQ(hide_terms(data, hide)[0], 0.0);
}

TEST(PointLosses, RejectsBadConfig) {
  const Dataset data = one_row(1.0, 2.0, 5.0);
  HideConfig hide;
  hide.alpha = -1.0;
  EXPECT_EQ(code_of([&] { point_losses(data, line(1, 0), hide); }), ErrorCode::kInvalidArgument);
  hide = {};
  hide.mode = HideMode::kPlant;
  EXPECT_EQ(code_of([&] { point_losses(data, line(1, 0), hide); }), ErrorCode::kInvalidArgument);
  LinearModel wide;
  wide.weights = Vector::Zero(2);
  hide.plant_model = wide;
  EXPECT_EQ(code_of([&] { point_losses(data, line(1, 0), hide); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { point_losses(data, wide, HideConfig{}); }), ErrorCode::kInvalidArgument);
}

TEST(PointLosses, JobsDoNotChangeResults) {
  const Dataset data = gen_linear(3, 5000, 4, 0.5);
  const LinearModel m = fit_ols(data.features(), data.continuous(Role::kY));
  HideConfig hide;
  hide.mode = HideMode::kPlant;
  hide.plant_model = make_plant(1, 4);
  const auto a = point_losses(data, m, hide, 1);
  EXPECT_EQ(point_losses(data, m, hide, 3), a);
  EXPECT_EQ(point_losses(data, m, hide, 8), a);
}

TEST(PointLosses, HugeAlphaOrdersByHideTermAlone) {
  const Dataset data = gen_linear(5, 300, 3, 0.5);
  const LinearModel m = fit_ols(data.features(), data.continuous(Role::kY));
  HideConfig hide;
  hide.mode = HideMode::kHideValue;
  hide.alpha = 1e6;
  const auto combined = select_bottom_k(point_losses(data, m, hide), 30);
  const auto terms = hide_terms(data, hide);
  EXPECT_EQ(combined, select_bottom_k(terms, 30));
}

TEST(PointLosses, PermutingRowsPermutesLosses) {
  const Dataset data = gen_linear(7, 50, 2, 0.5);
  const LinearModel m = fit_ols(data.features(), data.continuous(Role::kY));
  HideConfig hide;
  hide.mode = HideMode::kPlant;
  hide.plant_model = make_plant(3, 2);
  std::vector<std::size_t> perm(50);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(1);
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
  const auto base = point_losses(data, m, hide);
  const auto permuted = point_losses(data.subset(perm), m, hide);
  for (std::size_t r = 0; r < perm.size(); ++r) EXPECT_EQ(permuted[r], base[perm[r]]);
  const auto sel = select_bottom_k(base, 10).indices;
  std::set<std::size_t> mapped;
  for (std::size_t r : select_bottom_k(permuted, 10).indices) mapped.insert(perm[r]);
  EXPECT_EQ(std::vector<std::size_t>(mapped.begin(), mapped.end()), sel);
}

TEST(BottomK, SmallestWithSortedOutput) {
  const std::vector<double> losses{3, 1, 2};
  EXPECT_EQ(select_bottom_k(losses, 2).indices, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(select_bottom_k(losses, 3).indices, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(select_bottom_k(losses, 1, "abc").parent_fingerprint, "abc");
}

TEST(BottomK, TiesGoToSmallerIndex) {
  const std::vector<double> losses{1, 0, 1, 1, 0};
  EXPECT_EQ(select_bottom_k(losses, 3).indices, (std::vector<std::size_t>{0, 1, 4}));
}

TEST(BottomK, RejectsBadInput) {
  const std::vector<double> losses{1, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_EQ(code_of([&] { select_bottom_k(losses, 1); }), ErrorCode::kInvalidArgument);
  const std::vector<double> ok{1, 2};
  EXPECT_EQ(code_of([&] { select_bottom_k(ok, 0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { select_bottom_k(ok, 3); }), ErrorCode::kInvalidArgument);
}

TEST(BottomK, MatchesExhaustiveOracle) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    const std::size_t n = 1 + rng.uniform_index(10);
    const std::size_t k = 1 + rng.uniform_index(n);
    std::vector<double> losses(n);
    for (double& v : losses) v = static_cast<double>(rng.uniform_index(4));
    const auto expected = oracle::bottom_k(losses, k);
    EXPECT_EQ(select_bottom_k(losses, k).indices, expected.indices) << "seed " << seed;
  }
}

TEST(MakePlant, StandardNormalCoefficients) {
  std::vector<double> values;
  for (std::uint64_t seed = 0; seed < 2500; ++seed) {
    const LinearModel p = make_plant(seed, 3);
    for (Eigen::Index j = 0; j < 3; ++j) values.push_back(p.weights[j]);
    values.push_back(p.intercept);
  }
  const MomentStats s = moments(values);
  EXPECT_NEAR(s.mean, 0.0, 0.03);
  EXPECT_NEAR(s.variance, 1.0, 0.05);
  EXPECT_EQ(make_plant(9, 3), make_plant(9, 3));
  EXPECT_EQ(code_of([] { make_plant(1, 0); }), ErrorCode::kInvalidArgument);
}

TEST(HideValue, CoreSetShrinksSecretVariance) {
  int better = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset data = gen_linear(seed, 1000, 3, 0.5);
    const LinearModel m = fit_ols(data.features(), data.continuous(Role::kY));
    HideConfig hide;
    hide.mode = HideMode::kHideValue;
    const CoreSet cs = select_bottom_k(point_losses(data, m, hide), 50);
    const CoreSet rnd = random_subset(1000, 50, seed);
    const auto& z = data.continuous(Role::kZ);
    const std::span<const double> zs(z.data(), static_cast<std::size_t>(z.size()));
    if (moments(zs, cs.indices).variance < moments(zs, rnd.indices).variance) ++better;
  }
  EXPECT_EQ(better, 20);
}

TEST(RandomSubset, DistinctSortedDeterministic) {
  const CoreSet a = random_subset(100, 30, 4, "fp");
  EXPECT_EQ(a.k(), 30u);
  EXPECT_EQ(a.parent_fingerprint, "fp");
  EXPECT_TRUE(std::is_sorted(a.indices.begin(), a.indices.end()));
  EXPECT_EQ(std::set<std::size_t>(a.indices.begin(), a.indices.end()).size(), 30u);
  EXPECT_LT(a.indices.back(), 100u);
  EXPECT_EQ(random_subset(100, 30, 4, "fp"), a);
  EXPECT_NE(random_subset(100, 30, 5).indices, a.indices);
  EXPECT_EQ(random_subset(5, 5, 1).indices, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(code_of([] { random_subset(5, 6, 1); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { random_subset(5, 0, 1); }), ErrorCode::kInvalidArgument);
}

TEST(RandomSubset, IndicesAreRoughlyUniform) {
  std::vector<int> hits(20, 0);
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    for (std::size_t i : random_subset(20, 5, seed).indices) ++hits[i];
  }
  for (int h : hits) EXPECT_NEAR(h, 500, 80);
}

TEST(MomentCoreSet, PicksExtremesWhenBalanced) {
  const std::vector<double> s{-2, -1, 1, 2};
  EXPECT_EQ(select_moment_coreset(s, 2, 0.01).indices, (std::vector<std::size_t>{0, 3}));
  EXPECT_EQ(select_moment_coreset(s, 4, 0.01).indices, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(MomentCoreSet, RejectsBadInput) {
  const std::vector<double> s{1, 2, 3};
  EXPECT_EQ(code_of([&] { select_moment_coreset(s, 1, 0.1); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { select_moment_coreset(s, 4, 0.1); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { select_moment_coreset(s, 2, 0.0); }), ErrorCode::kInvalidArgument);
  const std::vector<double> bad{1, std::numeric_limits<double>::infinity(), 3};
  EXPECT_EQ(code_of([&] { select_moment_coreset(bad, 2, 0.1); }), ErrorCode::kInvalidArgument);
}

TEST(MomentCoreSet, InfeasibleReportsBestGap) {
  // Mean is 1/3; any pair has mean 0 or 0.5.
  const std::vector<double> s{0, 0, 1};
  try {
    select_moment_coreset(s, 2, 0.1);
    FAIL();
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasible);
    EXPECT_NEAR(e.best_gap(), 1.0 / 6.0, 1e-12);
  }
}

TEST(MomentCoreSet, MeetsToleranceAndSpreadsOut) {
  const Dataset data = gen_normal_scalar(3, 400, 1.0, 2.0);
  const auto col = data.features().col(0);
  const std::vector<double> s(col.data(), col.data() + col.size());
  const CoreSet cs = select_moment_coreset(s, 100, 0.05);
  EXPECT_EQ(cs.k(), 100u);
  EXPECT_TRUE(std::is_sorted(cs.indices.begin(), cs.indices.end()));
  const MomentStats full = moments(s);
  const MomentStats sub = moments(s, cs.indices);
  EXPECT_LE(std::abs(sub.mean - full.mean), 0.05);
  EXPECT_GT(sub.variance, full.variance);
}

TEST(MomentCoreSet, MatchesExhaustiveOracleOnSmallInputs) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const std::size_t n = 4 + rng.uniform_index(9);
    const std::size_t k = 2 + rng.uniform_index(n - 2);
    std::vector<double> s(n);
    for (double& v : s) v = rng.normal();
    const auto best = oracle::max_variance(s, k, 0.1);
    if (!best) {
      EXPECT_THROW(select_moment_coreset(s, k, 0.1), InfeasibleError) << "seed " << seed;
      continue;
    }
    const CoreSet cs = select_moment_coreset(s, k, 0.1);
    EXPECT_NEAR(moments(s, cs.indices).variance, *best, 1e-9 * std::max(1.0, *best))
        << "seed " << seed << " n=" << n << " k=" << k;
  }
}

TEST(Moments, PopulationStatistics) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(moments(v).mean, 2.5);
  EXPECT_DOUBLE_EQ(moments(v).variance, 1.25);
  const std::vector<std::size_t> sub{0, 3};
  EXPECT_DOUBLE_EQ(moments(v, sub).mean, 2.5);
  EXPECT_DOUBLE_EQ(moments(v, sub).variance, 2.25);
}

TEST(Names, HideModesAndPlantLabelsRoundTrip) {
  for (HideMode m : {HideMode::kNone, HideMode::kHideValue, HideMode::kPlant}) {
    EXPECT_EQ(parse_hide_mode(hide_mode_name(m)), m);
  }
  for (PlantLabel l : {PlantLabel::kSecret, PlantLabel::kLiteralPublic}) {
    EXPECT_EQ(parse_plant_label(plant_label_name(l)), l);
  }
  EXPECT_FALSE(parse_hide_mode("bogus").has_value());
}

}  // namespace
}  // namespace privcore
