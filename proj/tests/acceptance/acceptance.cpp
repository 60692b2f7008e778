// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "privcore/csv.hpp"
#include "privcore/dataset.hpp"
#include "privcore/error.hpp"
#include "privcore/gradtrace.hpp"
#include "privcore/privacy_select.hpp"
#include "privcore/report.hpp"
#include "privcore/rng.hpp"
#include "privcore/taskmask.hpp"

using namespace privcore;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string num(const char* name, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s=%.4f", name, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

LinearPipelineConfig linear_setup() {
  LinearPipelineConfig c;
  c.seed = 0;
  c.n = 1000;
  c.k = 50;
  c.mode = HideMode::kPlant;
  c.alpha = 1.0;
  return c;
}

constexpr std::size_t kLinearSeeds = 20;
constexpr std::size_t kMaskSeeds = 10;

Outcome linear_plant() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const MultiSeedReport r = run_linear_multi(linear_setup(), kLinearSeeds);
  const double elapsed = seconds_since(start);
  const double r2cy = r.metric("r2_coreset_on_coreset_y").stats.median;
  const double shift = r.metric("y_full_r2_shift").stats.median;
  const double r2z = r.metric("r2_coreset_model_on_full_z").stats.median;
  const double cosine = r.metric("plant_cosine").stats.median;
  o.check(r2cy >= 0.95, num("median r2_coreset(y)", r2cy) + " >= 0.95");
  o.check(shift <= 0.05, num("median |r2_full shift of y|", shift) + " <= 0.05");
  o.check(r2z < 0.0, num("median r2_full(z from core-set)", r2z) + " < 0");
  o.check(cosine >= 0.9, num("median cosine(z fit, plant)", cosine) + " >= 0.9");
  o.check(elapsed < 30.0, num("seconds", elapsed) + " < 30");
  return o;
}

Outcome alpha_zero_control() {
  Outcome o;
  LinearPipelineConfig c = linear_setup();
  c.alpha = 0.0;
  const MultiSeedReport r = run_linear_multi(c, kLinearSeeds);
  const double r2z = r.metric("r2_coreset_model_on_full_z").stats.median;
  o.check(r2z > 0.5, num("median r2_full(z from core-set) at alpha=0", r2z) + " > 0.5");
  return o;
}

Outcome hide_value_variance() {
  Outcome o;
  LinearPipelineConfig c = linear_setup();
  c.mode = HideMode::kHideValue;
  const MultiSeedReport r = run_linear_multi(c, kLinearSeeds);
  std::vector<double> random_var;
  for (std::size_t s = 0; s < kLinearSeeds; ++s) {
    c.seed = s;
    const Dataset data = linear_pipeline_dataset(c);
    const Vector& z = data.continuous(Role::kZ);
    const CoreSet sample = random_subset(data.n(), c.k, s);
    random_var.push_back(
        moments(std::span<const double>(z.data(), data.n()), sample.indices).variance);
  }
  const double core = r.metric("z_variance_coreset").stats.median;
  const double rand = median(random_var);
  o.check(core <= 0.5 * rand,
          num("median core-set z variance", core) + " <= 0.5 x " + num("median random", rand));
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  Rng rng(derive_seed(4, Stream::kSample));
  int bottom_cases = 0, bottom_bad = 0;
  for (std::size_t n = 1; n <= 12; ++n) {
    for (int trial = 0; trial < 4; ++trial) {
      std::vector<double> losses(n);
      for (auto& l : losses) {
        // Half the trials use small integers so ties are common.
        l = trial % 2 == 0 ? static_cast<double>(rng.uniform_index(4)) : rng.normal();
      }
      for (std::size_t k = 1; k <= n; ++k) {
        ++bottom_cases;
        const CoreSet got = select_bottom_k(losses, k);
        const auto want = oracle::bottom_k(losses, k);
        if (got.indices != want.indices) ++bottom_bad;
      }
    }
  }
  o.check(bottom_bad == 0, "bottom-k " + std::to_string(bottom_cases - bottom_bad) + "/" +
                               std::to_string(bottom_cases) + " match");

  int bal_cases = 0, bal_bad = 0;
  for (std::size_t n = 1; n <= 12; ++n) {
    for (int classes = 1; classes <= 3; ++classes) {
      for (int trial = 0; trial < 4; ++trial) {
        std::vector<int> labels(n);
        for (auto& l : labels) l = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(classes)));
        std::vector<double> scores(n);
        for (auto& s : scores) {
          s = trial % 2 == 0 ? static_cast<double>(rng.uniform_index(4)) : rng.uniform01();
        }
        for (std::size_t k = 1; k <= n; ++k) {
          ++bal_cases;
          const auto want = oracle::balanced(scores, labels, classes, k);
          std::optional<CoreSet> got;
          try {
            got = class_balanced_select(scores, labels, classes, k);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kInfeasible) ++bal_bad;
          }
          if (want.indices.empty() != !got.has_value()) {
            ++bal_bad;
            continue;
          }
          if (!got) continue;
          double total = 0.0;
          for (std::size_t i : got->indices) total += scores[i];
          const bool distinct = trial % 2 == 1;
          if (total != want.value || (distinct && got->indices != want.indices)) ++bal_bad;
        }
      }
    }
  }
  o.check(bal_bad == 0, "class-balanced " + std::to_string(bal_cases - bal_bad) + "/" +
                            std::to_string(bal_cases) + " match");

  int mom_cases = 0, mom_bad = 0;
  double worst = 1.0;
  for (std::size_t n = 2; n <= 16; ++n) {
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<double> samples(n);
      for (auto& s : samples) s = rng.normal();
      const double tol = 0.1;
      for (std::size_t k = 2; k <= n; ++k) {
        const auto best = oracle::max_variance(samples, k, tol);
        if (!best) continue;
        ++mom_cases;
        try {
          const CoreSet got = select_moment_coreset(samples, k, tol);
          const MomentStats all = moments(samples);
          const MomentStats sub = moments(samples, got.indices);
          const double ratio = *best > 0.0 ? sub.variance / *best : 1.0;
          worst = std::min(worst, ratio);
          if (std::abs(sub.mean - all.mean) > tol || ratio < 0.95) ++mom_bad;
        } catch (const Error&) {
          ++mom_bad;
          worst = 0.0;
        }
      }
    }
  }
  o.check(mom_bad == 0, "moment " + std::to_string(mom_cases - mom_bad) + "/" +
                            std::to_string(mom_cases) + " reach 95% of max variance (" +
                            num("worst ratio", worst) + ")");
  return o;
}

Outcome gradient_correctness() {
  Outcome o;
  Rng rng(derive_seed(5, Stream::kSample));
  int bad = 0;
  double worst = 0.0;
  for (int instance = 0; instance < 100; ++instance) {
    const int classes = 2 + static_cast<int>(rng.uniform_index(5));
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.uniform_index(6));
    SoftmaxClassifier clf;
    clf.weights = Matrix(classes, d + 1);
    for (Eigen::Index r = 0; r < clf.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < clf.weights.cols(); ++c) clf.weights(r, c) = rng.normal();
    }
    Vector x(d);
    for (Eigen::Index j = 0; j < d; ++j) x[j] = rng.normal();
    const int label = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(classes)));
    const double analytic = example_gradient_norm(clf, x, label);
    const double numeric = oracle::numeric_gradient(clf, x, label).norm();
    const double rel = std::abs(analytic - numeric) / std::max(numeric, 1e-12);
    worst = std::max(worst, rel);
    if (rel > 1e-4) ++bad;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "worst=%.2e", worst);
  o.check(bad == 0, std::to_string(100 - bad) + "/100 instances within 1e-4 relative (" + buf + ")");
  return o;
}

Outcome bucket_trend() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  MaskPipelineConfig c;
  c.constructions.clear();
  c.buckets = 5;
  std::vector<std::vector<double>> acc(5);
  for (std::size_t s = 0; s < kMaskSeeds; ++s) {
    c.seed = s;
    const MaskPipelineReport r = run_mask_pipeline(c);
    for (const auto& b : r.buckets) acc[static_cast<std::size_t>(b.bucket)].push_back(b.fine_acc);
  }
  const double elapsed = seconds_since(start);
  std::vector<double> medians;
  std::string series;
  for (auto& a : acc) {
    medians.push_back(median(a));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.4f", series.empty() ? "" : ",", medians.back());
    series += buf;
  }
  const int inversions = count_inversions(medians);
  o.check(inversions <= 1, "median fine accuracy by bucket [" + series + "] has " +
                               std::to_string(inversions) + " inversion(s) <= 1");
  o.check(elapsed < 60.0, num("seconds", elapsed) + " < 60");
  return o;
}

Outcome masking_direction() {
  Outcome o;
  const MultiSeedReport r = run_mask_multi(MaskPipelineConfig{}, kMaskSeeds);
  auto med = [&](const std::string& name) { return r.metric(name).stats.median; };
  for (const std::string task : {"coarse_acc", "fine_acc"}) {
    for (const std::string minnorm : {"min-norm-fine", "min-norm-coarse"}) {
      const double a = med(minnorm + "." + task);
      const double b = med("random." + task);
      o.check(a > b, num((minnorm + " " + task).c_str(), a) + " > " + num("random", b));
    }
  }
  const double fine_gap = med("fine-masking.gap");
  const double coarse_gap = med("coarse-masking.gap");
  o.check(fine_gap > coarse_gap,
          num("fine-masking gap", fine_gap) + " > " + num("coarse-masking gap", coarse_gap));
  const double fm_fine = med("fine-masking.fine_acc");
  const double rnd_fine = med("random.fine_acc");
  o.check(fm_fine < rnd_fine, num("fine-masking fine_acc", fm_fine) + " < " + num("random", rnd_fine));
  const double fm_coarse = med("fine-masking.coarse_acc");
  const double rnd_coarse = med("random.coarse_acc");
  o.check(fm_coarse >= rnd_coarse - 0.02,
          num("fine-masking coarse_acc", fm_coarse) + " >= " + num("random", rnd_coarse) + " - 0.02");
  return o;
}

Outcome determinism() {
  Outcome o;
  LinearPipelineConfig lc = linear_setup();
  lc.seed = 11;
  for (HideMode mode : {HideMode::kNone, HideMode::kHideValue, HideMode::kPlant}) {
    lc.mode = mode;
    const std::string a = dump_json(to_json(run_linear_pipeline(lc)));
    const std::string b = dump_json(to_json(run_linear_pipeline(lc, 2)));
    o.check(a == b, std::string("linear ") + std::string(hide_mode_name(mode)) + " identical");
  }
  MaskPipelineConfig mc;
  mc.seed = 11;
  const std::string ma = dump_json(to_json(run_mask_pipeline(mc)));
  const std::string mb = dump_json(to_json(run_mask_pipeline(mc, 2)));
  o.check(ma == mb, "mask pipeline identical");
  lc = linear_setup();
  const std::string la = dump_json(to_json(run_linear_multi(lc, 4, 1)));
  const std::string lb = dump_json(to_json(run_linear_multi(lc, 4, 3)));
  o.check(la == lb, "multi-seed linear identical across job counts");
  const std::string ga = to_csv_string(gen_hierarchical(11, HierarchyConfig{}));
  const std::string gb = to_csv_string(gen_hierarchical(11, HierarchyConfig{}));
  o.check(ga == gb, "generator output identical");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"linear plant-mode masking over 20 seeds", linear_plant},
      {"alpha=0 control keeps z predictable", alpha_zero_control},
      {"hide-value shrinks core-set z variance", hide_value_variance},
      {"selection matches exhaustive oracles", oracle_equivalence},
      {"gradient norms match finite differences", gradient_correctness},
      {"bucket accuracy falls with gradient norm", bucket_trend},
      {"masking constructions order as expected", masking_direction},
      {"pipelines are byte-deterministic", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    if (!out.pass) ++failed;
    std::printf("%s  %zu  %s: %s\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
