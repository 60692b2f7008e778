#include <benchmark/benchmark.h>

#include "privcore/dataset.hpp"
#include "privcore/gradtrace.hpp"
#include "privcore/linreg.hpp"
#include "privcore/privacy_select.hpp"
#include "privcore/taskmask.hpp"

namespace {

using namespace privcore;

void BM_FitOls(benchmark::State& state) {
  const Dataset data = gen_linear(1, static_cast<std::size_t>(state.range(0)), 8, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_ols(data.features(), data.continuous(Role::kY)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitOls)->Arg(1000)->Arg(100000);

void BM_PointLosses(benchmark::State& state) {
  const Dataset data = gen_linear(2, 100000, 8, 0.5);
  const LinearModel model = fit_ols(data.features(), data.continuous(Role::kY));
  HideConfig hide;
  hide.mode = HideMode::kPlant;
  hide.plant_model = make_plant(3, 8);
  const auto jobs = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(point_losses(data, model, hide, jobs));
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_PointLosses)->Arg(1)->Arg(4);

void BM_SelectBottomK(benchmark::State& state) {
  const Dataset data = gen_normal_scalar(4, static_cast<std::size_t>(state.range(0)), 0.0, 1.0);
  const auto col = data.features().col(0);
  const std::vector<double> losses(col.data(), col.data() + col.size());
  for (auto _ : state) benchmark::DoNotOptimize(select_bottom_k(losses, losses.size() / 20));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SelectBottomK)->Arg(10000)->Arg(1000000);

void BM_SelectMomentCoreset(benchmark::State& state) {
  const Dataset data = gen_normal_scalar(5, static_cast<std::size_t>(state.range(0)), 1.0, 2.0);
  const auto col = data.features().col(0);
  const std::vector<double> samples(col.data(), col.data() + col.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_moment_coreset(samples, samples.size() / 4, 0.05));
  }
}
BENCHMARK(BM_SelectMomentCoreset)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_TrainWithTrace(benchmark::State& state) {
  const Dataset data = gen_hierarchical(6, HierarchyConfig{});
  TrainConfig config;
  config.epochs = 5;
  const TrainOptions options{static_cast<unsigned>(state.range(0)), false};
  for (auto _ : state) benchmark::DoNotOptimize(train(data, Task::kFine, config, options));
}
BENCHMARK(BM_TrainWithTrace)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ClassBalancedSelect(benchmark::State& state) {
  const Dataset data = gen_hierarchical(7, HierarchyConfig{});
  const auto& labels = data.categorical(Role::kFine);
  const auto norms = data.features().col(0);
  const std::vector<double> scores(norms.data(), norms.data() + norms.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(class_balanced_select(scores, labels.labels, labels.num_classes, 100));
  }
}
BENCHMARK(BM_ClassBalancedSelect);

}  // namespace

BENCHMARK_MAIN();
