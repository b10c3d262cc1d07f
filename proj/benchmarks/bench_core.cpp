#include <benchmark/benchmark.h>

#include "fairsim/bias.hpp"
#include "fairsim/glm.hpp"
#include "fairsim/interventions.hpp"
#include "fairsim/metrics.hpp"
#include "fairsim/synthgen.hpp"

using namespace fairsim;

namespace {

Dataset make_data(std::size_t n, std::uint64_t seed = 1) {
    GenConfig cfg;
    cfg.n = n;
    Rng rng(seed);
    return sample_ground_truth(cfg, rng);
}

std::vector<WeightedSample> unit_samples(const Dataset& ds) {
    std::vector<WeightedSample> samples(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i)
        samples[i] = {expand_features(ds.features[i], ds.group[i]), ds.label[i], 1.0};
    return samples;
}

void BM_Generate(benchmark::State& state) {
    GenConfig cfg;
    cfg.n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        Rng rng(++seed);
        benchmark::DoNotOptimize(sample_ground_truth(cfg, rng));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Generate)->Arg(1000)->Arg(30000)->Unit(benchmark::kMillisecond);

void BM_FitLogreg(benchmark::State& state) {
    const Dataset ds = make_data(static_cast<std::size_t>(state.range(0)));
    const auto samples = unit_samples(ds);
    for (auto _ : state) benchmark::DoNotOptimize(fit_weighted_logreg(samples));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitLogreg)->Arg(1000)->Arg(10000)->Arg(30000)->Unit(benchmark::kMillisecond);

void BM_LagrangianWeights(benchmark::State& state) {
    const Dataset ds = make_data(30000);
    for (auto _ : state) benchmark::DoNotOptimize(lagrangian_weights(ds, 0.9, -1.1));
    state.SetItemsProcessed(state.iterations() * 30000);
}
BENCHMARK(BM_LagrangianWeights)->Unit(benchmark::kMillisecond);

void BM_GridSearchEO(benchmark::State& state) {
    Rng bias_rng(7);
    const Dataset train = inject_underrepresentation(make_data(3000), 0.4, bias_rng);
    GridSpec grid;
    grid.grid_size = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(grid_search_eo(train, grid));
}
BENCHMARK(BM_GridSearchEO)->Arg(3)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_ThresholdPostprocess(benchmark::State& state) {
    const Dataset ds = make_data(static_cast<std::size_t>(state.range(0)));
    const ModelCoeffs base = fit_weighted_logreg(unit_samples(ds)).model;
    const auto scores = score_dataset(base, ds);
    for (auto _ : state)
        benchmark::DoNotOptimize(threshold_postprocess(scores, ds.group, ds.label, base));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ThresholdPostprocess)->Arg(10000)->Arg(30000)->Unit(benchmark::kMillisecond);

void BM_DisparityMetric(benchmark::State& state) {
    const Dataset ds = make_data(30000);
    const ModelCoeffs base = fit_weighted_logreg(unit_samples(ds)).model;
    const auto preds = predict_dataset(base, ds);
    for (auto _ : state)
        benchmark::DoNotOptimize(eo_disparity(preds, ds.group, ds.label));
    state.SetItemsProcessed(state.iterations() * 30000);
}
BENCHMARK(BM_DisparityMetric)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
