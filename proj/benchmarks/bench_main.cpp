#include <benchmark/benchmark.h>

#include <vector>

#include "varsearch/costmodel.hpp"
#include "varsearch/experiment.hpp"
#include "varsearch/features.hpp"
#include "varsearch/generator.hpp"

using namespace varsearch;

namespace {

void BM_Accumulate(benchmark::State& state) {
  const auto scales = toy_default_scales();
  Rng rng(derive_stream(1, StreamKind::kGeneration, 0, 0));
  std::vector<Tensor3> residuals;
  for (std::size_t k = 1; k <= scales.scale_count(); ++k) {
    Tensor3 t(scales.at(k).rows, scales.at(k).cols, scales.feature_dim());
    for (auto& v : t.values()) v = rng.normal();
    residuals.push_back(std::move(t));
  }
  for (auto _ : state) benchmark::DoNotOptimize(accumulate(residuals, scales));
}
BENCHMARK(BM_Accumulate);

void BM_KMeans(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Rng data(derive_stream(2, StreamKind::kGeneration, 0, 0));
  Eigen::MatrixXd pts(n, 16);
  for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = data.normal();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng(derive_stream(seed++, StreamKind::kClustering, 0, 0));
    benchmark::DoNotOptimize(kmeanspp_cluster(pts, static_cast<std::size_t>(n) * 3 / 4, rng));
  }
}
BENCHMARK(BM_KMeans)->Arg(8)->Arg(32)->Arg(128);

void BM_Strategy(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.n = static_cast<std::size_t>(state.range(1));
  const auto strategy = static_cast<Strategy>(state.range(0));
  std::size_t replicate = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_experiment(cfg, strategy, replicate++).selected);
  }
}
BENCHMARK(BM_Strategy)
    ->ArgsProduct({{static_cast<long>(Strategy::kBon), static_cast<long>(Strategy::kTtsvar)},
                   {1, 4}})
    ->Unit(benchmark::kMillisecond);

void BM_CostModel(benchmark::State& state) {
  const auto scales = infinity_like_scales();
  const auto fixed = BatchSchedule::constant(scales.scale_count(), 1);
  const auto adaptive = make_default_schedule(scales.scale_count(), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compare_schedules(fixed, adaptive, scales, ModelDims{}));
  }
}
BENCHMARK(BM_CostModel);

}  // namespace
BENCHMARK_MAIN();
