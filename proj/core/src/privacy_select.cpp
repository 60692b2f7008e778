#include "privcore/privacy_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "privcore/error.hpp"
#include "privcore/parallel.hpp"
#include "privcore/rng.hpp"

namespace privcore {

std::string_view hide_mode_name(HideMode mode) {
  switch (mode) {
    case HideMode::kNone: return "none";
    case HideMode::kHideValue: return "hide-value";
    case HideMode::kPlant: return "plant";
  }
  return "?";
}

std::optional<HideMode> parse_hide_mode(std::string_view name) {
  if (name == "none") return HideMode::kNone;
  if (name == "hide-value") return HideMode::kHideValue;
  if (name == "plant") return HideMode::kPlant;
  return std::nullopt;
}

std::string_view plant_label_name(PlantLabel label) {
  return label == PlantLabel::kSecret ? "secret" : "literal-public";
}

std::optional<PlantLabel> parse_plant_label(std::string_view name) {
  if (name == "secret") return PlantLabel::kSecret;
  if (name == "literal-public") return PlantLabel::kLiteralPublic;
  return std::nullopt;
}

namespace {

void validate(const Dataset& data, const HideConfig& hide) {
  if (!(hide.alpha >= 0.0) || !std::isfinite(hide.alpha)) {
    throw_invalid("alpha must be a finite nonnegative number");
  }
  switch (hide.mode) {
    case HideMode::kNone:
      break;
    case HideMode::kHideValue:
      (void)data.continuous(Role::kZ);
      if (hide.z_center && !std::isfinite(*hide.z_center)) throw_invalid("z_center must be finite");
      break;
    case HideMode::kPlant:
      if (!hide.plant_model) throw_invalid("plant mode requires a plant model");
      if (static_cast<std::size_t>(hide.plant_model->weights.size()) != data.d()) {
        throw_invalid("plant model dimension does not match dataset");
      }
      (void)data.continuous(hide.plant_label == PlantLabel::kSecret ? Role::kZ : Role::kY);
      break;
  }
}

}  // namespace

std::vector<double> hide_terms(const Dataset& data, const HideConfig& hide) {
  validate(data, hide);
  std::vector<double> out(data.n(), 0.0);
  const Matrix& x = data.features();
  switch (hide.mode) {
    case HideMode::kNone:
      break;
    case HideMode::kHideValue: {
      const Vector& z = data.continuous(Role::kZ);
      const double center = hide.z_center.value_or(z.mean());
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double dz = z[static_cast<Eigen::Index>(i)] - center;
        out[i] = dz * dz;
      }
      break;
    }
    case HideMode::kPlant: {
      const Vector& label =
          data.continuous(hide.plant_label == PlantLabel::kSecret ? Role::kZ : Role::kY);
      for (std::size_t i = 0; i < out.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        const double r = label[row] - hide.plant_model->predict_row(x.row(row).transpose());
        out[i] = r * r;
      }
      break;
    }
  }
  return out;
}

std::vector<double> point_losses(const Dataset& data, const LinearModel& public_model,
                                 const HideConfig& hide, unsigned jobs) {
  validate(data, hide);
  if (static_cast<std::size_t>(public_model.weights.size()) != data.d()) {
    throw_invalid("public model dimension does not match dataset");
  }
  const Vector& y = data.continuous(Role::kY);
  const Matrix& x = data.features();

  const Vector* secret = nullptr;
  double center = 0.0;
  if (hide.mode == HideMode::kHideValue) {
    secret = &data.continuous(Role::kZ);
    center = hide.z_center.value_or(secret->mean());
  } else if (hide.mode == HideMode::kPlant) {
    secret = &data.continuous(hide.plant_label == PlantLabel::kSecret ? Role::kZ : Role::kY);
  }

  std::vector<double> losses(data.n());
  parallel_for(data.n(), jobs, [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    const double fit = y[row] - public_model.predict_row(x.row(row).transpose());
    double h = 0.0;
    if (hide.mode == HideMode::kHideValue) {
      const double dz = (*secret)[row] - center;
      h = dz * dz;
    } else if (hide.mode == HideMode::kPlant) {
      const double r = (*secret)[row] - hide.plant_model->predict_row(x.row(row).transpose());
      h = r * r;
    }
    losses[i] = fit * fit + hide.alpha * h;
  });
  return losses;
}

CoreSet select_bottom_k(std::span<const double> losses, std::size_t k,
                        std::string parent_fingerprint) {
  const std::size_t n = losses.size();
  if (k < 1 || k > n) {
    throw_invalid("k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(losses[i])) throw_invalid("loss at row " + std::to_string(i) + " is NaN");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) {
    return losses[a] < losses[b] || (losses[a] == losses[b] && a < b);
  };
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(),
                   less);
  order.resize(k);
  std::sort(order.begin(), order.end());
  return CoreSet{std::move(parent_fingerprint), std::move(order)};
}

LinearModel make_plant(std::uint64_t seed, std::size_t d) {
  if (d < 1) throw_invalid("make_plant: d must be positive");
  Rng rng(seed);
  LinearModel plant;
  plant.weights.resize(static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < plant.weights.size(); ++j) plant.weights[j] = rng.normal();
  plant.intercept = rng.normal();
  return plant;
}

CoreSet random_subset(std::size_t n, std::size_t k, std::uint64_t seed,
                      std::string parent_fingerprint) {
  if (k < 1 || k > n) {
    throw_invalid("k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
  Rng rng(derive_seed(seed, Stream::kSample));
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
    std::swap(rows[i], rows[j]);
  }
  rows.resize(k);
  std::sort(rows.begin(), rows.end());
  return {std::move(parent_fingerprint), std::move(rows)};
}

MomentStats moments(std::span<const double> values) {
  MomentStats s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.variance = ss / static_cast<double>(values.size());
  return s;
}

MomentStats moments(std::span<const double> values, std::span<const std::size_t> subset) {
  std::vector<double> picked;
  picked.reserve(subset.size());
  for (std::size_t i : subset) picked.push_back(values[i]);
  return moments(picked);
}

namespace {

// Working state of the moment core-set repair. Deviations are taken from the
// full-sample mean, so the subset mean is on target when `sum` is near zero.
class MomentRepair {
 public:
  MomentRepair(const std::vector<double>& dev, std::vector<std::size_t> chosen,
               std::vector<std::size_t> unchosen, double budget)
      : dev_(&dev), chosen_(std::move(chosen)), budget_(budget) {
    for (std::size_t i : chosen_) {
      sum_ += (*dev_)[i];
      sum_sq_ += (*dev_)[i] * (*dev_)[i];
    }
    for (std::size_t i : unchosen) pool_.emplace((*dev_)[i], i);
  }

  static constexpr double kPairWorkLimit = 2e6;

  // Pair-swap candidates examined per move.
  static double pair_work(std::size_t chosen, std::size_t unchosen) {
    const auto pairs_of = [](std::size_t m) {
      return 0.5 * static_cast<double>(m) * static_cast<double>(m > 0 ? m - 1 : 0);
    };
    return pairs_of(chosen) * pairs_of(unchosen);
  }

  bool feasible() const { return std::abs(sum_) <= budget_; }
  std::vector<std::size_t> take() { return std::move(chosen_); }

  // Moves toward feasibility: a feasible single swap, else a feasible pair
  // swap, else whichever single or pair swap shrinks the gap most.
  void reach_tolerance(std::size_t max_moves) {
    for (std::size_t move = 0; move < max_moves && !feasible(); ++move) {
      Candidate single = best_single();
      if (single.feasible) {
        apply(single);
        return;
      }
      Candidate pair = best_pair();
      if (pair.feasible) {
        apply(pair);
        return;
      }
      const Candidate& closer = pair.gap < single.gap ? pair : single;
      if (!closer.valid || closer.gap >= std::abs(sum_)) return;
      apply(closer);
    }
  }

  // Feasibility-preserving single or pair swaps that increase the spread.
  void widen(std::size_t max_moves) {
    for (std::size_t move = 0; move < max_moves; ++move) {
      Candidate single = best_single();
      Candidate pair = best_pair();
      const Candidate& c = pair.feasible && pair.score > single.score ? pair : single;
      if (!c.feasible || c.score <= score() + 1e-12 * std::abs(score())) return;
      apply(c);
    }
  }

  // k times the subset variance.
  double score() const { return spread(sum_, sum_sq_); }

 private:
  using Entry = std::pair<double, std::size_t>;

  struct Candidate {
    bool valid = false;
    bool feasible = false;
    double gap = std::numeric_limits<double>::infinity();
    double score = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> out;  // positions in chosen_
    std::vector<Entry> in;
  };

  void offer(Candidate& best_feasible, Candidate& closest, std::vector<std::size_t> out,
             std::vector<Entry> in) const {
    double new_sum = sum_;
    double new_sq = sum_sq_;
    for (std::size_t pos : out) {
      new_sum -= (*dev_)[chosen_[pos]];
      new_sq -= (*dev_)[chosen_[pos]] * (*dev_)[chosen_[pos]];
    }
    for (const Entry& e : in) {
      new_sum += e.first;
      new_sq += e.first * e.first;
    }
    const double gap = std::abs(new_sum);
    const double score = spread(new_sum, new_sq);
    if (gap <= budget_) {
      if (score > best_feasible.score) best_feasible = {true, true, gap, score, out, in};
    } else if (gap < closest.gap) {
      closest = {true, false, gap, score, std::move(out), std::move(in)};
    }
  }

  Candidate best_single() const {
    Candidate best_feasible;
    Candidate closest;
    for (std::size_t pos = 0; pos < chosen_.size(); ++pos) {
      const double target = (*dev_)[chosen_[pos]] - sum_;
      auto lo = pool_.lower_bound({target - budget_, 0});
      auto hi = pool_.upper_bound({target + budget_, std::numeric_limits<std::size_t>::max()});
      // The spread is convex in the incoming value (k >= 2), so a window's
      // best entry is one of its ends.
      if (lo != hi) {
        offer(best_feasible, closest, {pos}, {*lo});
        offer(best_feasible, closest, {pos}, {*std::prev(hi)});
      }
      auto near = pool_.lower_bound({target, 0});
      if (near != pool_.end()) offer(best_feasible, closest, {pos}, {*near});
      if (near != pool_.begin()) offer(best_feasible, closest, {pos}, {*std::prev(near)});
    }
    return best_feasible.valid ? best_feasible : closest;
  }

  Candidate best_pair() const {
    if (pair_work(chosen_.size(), pool_.size()) > kPairWorkLimit) return {};
    const std::vector<Entry> pool(pool_.begin(), pool_.end());
    struct PairSum {
      double sum;
      std::size_t a, b;
    };
    std::vector<PairSum> pairs;
    for (std::size_t a = 0; a < pool.size(); ++a) {
      for (std::size_t b = a + 1; b < pool.size(); ++b) {
        pairs.push_back({pool[a].first + pool[b].first, a, b});
      }
    }
    std::sort(pairs.begin(), pairs.end(), [](const PairSum& x, const PairSum& y) {
      return x.sum < y.sum || (x.sum == y.sum && (x.a < y.a || (x.a == y.a && x.b < y.b)));
    });
    const auto below = [](const PairSum& p, double v) { return p.sum < v; };

    Candidate best_feasible;
    Candidate closest;
    for (std::size_t i = 0; i < chosen_.size(); ++i) {
      for (std::size_t j = i + 1; j < chosen_.size(); ++j) {
        const double target = (*dev_)[chosen_[i]] + (*dev_)[chosen_[j]] - sum_;
        auto it = std::lower_bound(pairs.begin(), pairs.end(), target - budget_, below);
        for (; it != pairs.end() && it->sum <= target + budget_; ++it) {
          offer(best_feasible, closest, {i, j}, {pool[it->a], pool[it->b]});
        }
        auto near = std::lower_bound(pairs.begin(), pairs.end(), target, below);
        if (near != pairs.end()) offer(best_feasible, closest, {i, j}, {pool[near->a], pool[near->b]});
        if (near != pairs.begin()) {
          const PairSum& p = *std::prev(near);
          offer(best_feasible, closest, {i, j}, {pool[p.a], pool[p.b]});
        }
      }
    }
    return best_feasible.valid ? best_feasible : closest;
  }

  double spread(double sum, double sum_sq) const {
    return sum_sq - sum * sum / static_cast<double>(chosen_.size());
  }

  void apply(const Candidate& c) {
    for (std::size_t s = 0; s < c.out.size(); ++s) {
      std::size_t& slot = chosen_[c.out[s]];
      const Entry& incoming = c.in[s];
      sum_ += incoming.first - (*dev_)[slot];
      sum_sq_ += incoming.first * incoming.first - (*dev_)[slot] * (*dev_)[slot];
      pool_.erase(incoming);
      pool_.emplace((*dev_)[slot], slot);
      slot = incoming.second;
    }
  }

  const std::vector<double>* dev_;
  std::vector<std::size_t> chosen_;
  std::set<Entry> pool_;
  double budget_;
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
};

}  // namespace

CoreSet select_moment_coreset(std::span<const double> samples, std::size_t k,
                              double mean_tolerance) {
  const std::size_t n = samples.size();
  if (k < 2 || k > n) {
    throw_invalid("k=" + std::to_string(k) + " outside [2, " + std::to_string(n) + "]");
  }
  if (!(mean_tolerance > 0.0)) throw_invalid("mean_tolerance must be positive");
  for (double v : samples) {
    if (!std::isfinite(v)) throw_invalid("samples must be finite");
  }

  const double full_mean = moments(samples).mean;
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = samples[i] - full_mean;

  std::vector<std::size_t> sorted(n);
  std::iota(sorted.begin(), sorted.end(), std::size_t{0});
  std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
    return dev[a] < dev[b] || (dev[a] == dev[b] && a < b);
  });

  // Greedy: take the most extreme remaining point on the side that pulls the
  // running deviation sum back toward zero.
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  double sum = 0.0;
  std::size_t lo = 0;
  std::size_t hi = n - 1;  // may wrap once every point is taken; not read after
  while (chosen.size() < k) {
    bool take_low;
    if (sum > 0.0) {
      take_low = true;
    } else if (sum < 0.0) {
      take_low = false;
    } else {
      take_low = std::abs(dev[sorted[lo]]) >= std::abs(dev[sorted[hi]]);
    }
    const std::size_t pick = take_low ? sorted[lo++] : sorted[hi--];
    chosen.push_back(pick);
    sum += dev[pick];
  }
  std::vector<std::size_t> unchosen(sorted.begin() + static_cast<std::ptrdiff_t>(lo),
                                    sorted.begin() + static_cast<std::ptrdiff_t>(lo + (n - k)));

  // Slightly tighter than the tolerance so rounding in the final mean check holds.
  const double budget = mean_tolerance * static_cast<double>(k) * (1.0 - 1e-9);
  // Exhaustive-ish effort (pair swaps, long widening, a second start) only
  // on small instances; large ones take a bounded number of moves.
  const bool small = MomentRepair::pair_work(k, n - k) <= MomentRepair::kPairWorkLimit;
  const std::size_t max_moves = 4 * k + 16;
  const std::size_t widen_moves = small ? max_moves : 32;
  MomentRepair repair(dev, std::move(chosen), std::move(unchosen), budget);
  repair.reach_tolerance(max_moves);
  if (repair.feasible()) repair.widen(widen_moves);

  // Second start from the k points closest to the mean, which meets the
  // tolerance whenever a near-central subset does; keep the wider result.
  if (small || !repair.feasible()) {
    std::vector<std::size_t> central = sorted;
    std::stable_sort(central.begin(), central.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(dev[a]) < std::abs(dev[b]);
    });
    std::vector<std::size_t> rest(central.begin() + static_cast<std::ptrdiff_t>(k), central.end());
    central.resize(k);
    MomentRepair second(dev, std::move(central), std::move(rest), budget);
    second.reach_tolerance(max_moves);
    if (second.feasible()) {
      second.widen(widen_moves);
      if (!repair.feasible() || second.score() > repair.score()) repair = std::move(second);
    }
  }
  chosen = repair.take();

  std::sort(chosen.begin(), chosen.end());
  const double gap = std::abs(moments(samples, chosen).mean - full_mean);
  if (gap > mean_tolerance) {
    throw InfeasibleError("moment core-set: best mean gap " + std::to_string(gap) +
                              " exceeds tolerance " + std::to_string(mean_tolerance),
                          gap);
  }
  return CoreSet{{}, std::move(chosen)};
}

}  // namespace privcore
