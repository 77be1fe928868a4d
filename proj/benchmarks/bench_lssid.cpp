#include <benchmark/benchmark.h>

#include "lssid/lssid.hpp"

using namespace lssid;

namespace {

SampledDataset dataset_of_size(int n) {
    return generate_benchmark_dataset(n, 0.01, 0.1, 0.025, 1);
}

EstimatedModel warm_model(const SampledDataset& d, int num_modes) {
    const StateTrajectory states = initialize_states(d, 2, 0.0, 1);
    const ModeSequence modes = initialize_modes(num_modes, d.size(), 2);
    return fit_parameters(states, modes, d, 0.01, num_modes).model;
}

void bench_fit_states_qr(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SampledDataset d = dataset_of_size(n);
    const EstimatedModel model = warm_model(d, 2);
    const ModeSequence modes = initialize_modes(2, n, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(fit_states(model, modes, d, 0.01, StateSolver::DenseQr));
}
BENCHMARK(bench_fit_states_qr)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void bench_fit_states_normal(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SampledDataset d = dataset_of_size(n);
    const EstimatedModel model = warm_model(d, 2);
    const ModeSequence modes = initialize_modes(2, n, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            fit_states(model, modes, d, 0.01, StateSolver::NormalEquations));
}
BENCHMARK(bench_fit_states_normal)
    ->Arg(100)
    ->Arg(200)
    ->Arg(400)
    ->Arg(800)
    ->Unit(benchmark::kMillisecond);

void bench_fit_parameters(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SampledDataset d = dataset_of_size(n);
    const StateTrajectory states = initialize_states(d, 2, 0.0, 1);
    const ModeSequence modes = initialize_modes(2, n, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(fit_parameters(states, modes, d, 0.01, 2));
}
BENCHMARK(bench_fit_parameters)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void bench_estimate_modes(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SampledDataset d = dataset_of_size(n);
    const EstimatedModel model = warm_model(d, 2);
    const StateTrajectory states = initialize_states(d, 2, 0.0, 1);
    const ModeLossSpec loss = markov_mode_loss(2, 0.1, 1e-6);
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate_modes(model, states, d, loss));
}
BENCHMARK(bench_estimate_modes)->Arg(400)->Arg(4000)->Unit(benchmark::kMillisecond);

void bench_full_iteration(benchmark::State& state) {
    const SampledDataset d = dataset_of_size(400);
    FitConfig config;
    config.mode_loss = markov_mode_loss(2, 0.1, 1e-6);
    config.restarts = 1;
    config.n_max = 1;
    config.eps = 0.0;
    const StateTrajectory x0 = initialize_states(d, 2, 0.01, 1);
    const ModeSequence s0 = initialize_modes(2, 400, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(coordinate_descent(d, config, x0, s0));
}
BENCHMARK(bench_full_iteration)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
