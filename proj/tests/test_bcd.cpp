#include <doctest.h>

#include "test_helpers.hpp"

using namespace lssid;

namespace {

FitConfig small_config(int num_modes = 2, int nx = 2) {
    FitConfig c;
    c.num_modes = num_modes;
    c.nx = nx;
    c.alpha = 0.01;
    c.mode_loss = markov_mode_loss(num_modes, 0.1, 1e-6);
    c.eps = 1e-9;
    c.n_max = 50;
    c.restarts = 1;
    c.sigma_x = 0.01;
    c.seed = 1;
    return c;
}

}  // namespace

TEST_CASE("initialize_states: sigma_x = 0 is deterministic across seeds") {
    const SampledDataset d = generate_benchmark_dataset(100, 0.01, 0.1, 0.025, 3);
    const StateTrajectory a = initialize_states(d, 2, 0.0, 1);
    const StateTrajectory b = initialize_states(d, 2, 0.0, 99);
    CHECK((a - b).norm() == 0.0);
    CHECK(a.rows() == 100);
    CHECK(a.cols() == 2);
    CHECK(a.allFinite());
}

TEST_CASE("initialize_states: perturbation has the requested scale") {
    const SampledDataset d = generate_benchmark_dataset(400, 0.01, 0.1, 0.025, 3);
    const StateTrajectory base = initialize_states(d, 2, 0.0, 7);
    const StateTrajectory noisy = initialize_states(d, 2, 0.01, 7);
    const Mat delta = noisy - base;
    const double std = std::sqrt(delta.squaredNorm() / (delta.rows() * delta.cols()));
    CHECK(std >= 0.008);
    CHECK(std <= 0.012);

    // Same seed, same draw; different seed, different draw.
    CHECK((initialize_states(d, 2, 0.01, 7) - noisy).norm() == 0.0);
    CHECK((initialize_states(d, 2, 0.01, 8) - noisy).norm() > 0.0);
}

TEST_CASE("initialize_modes: uniform labels in range with roughly equal frequency") {
    const int n = 30000;
    const ModeSequence s = initialize_modes(3, n, 11);
    int counts[3] = {0, 0, 0};
    for (int m : s) {
        REQUIRE(m >= 1);
        REQUIRE(m <= 3);
        ++counts[m - 1];
    }
    for (int c : counts) {
        CHECK(c > n / 3 - 500);
        CHECK(c < n / 3 + 500);
    }
    CHECK(initialize_modes(3, 50, 11) == initialize_modes(3, 50, 11));
}

TEST_CASE("coordinate_descent: exact least-squares steps never increase the cost") {
    const SampledDataset d = generate_benchmark_dataset(150, 0.01, 0.1, 0.025, 5);
    const FitConfig c = small_config();
    const StateTrajectory x0 = initialize_states(d, 2, 0.01, 2);
    const ModeSequence s0 = initialize_modes(2, 150, 3);

    const FitResult r = coordinate_descent(d, c, x0, s0);
    REQUIRE(r.cost_trace.size() >= 2);
    REQUIRE(r.step_costs.size() + 1 == r.cost_trace.size());
    for (size_t i = 0; i < r.step_costs.size(); ++i) {
        // The parameter fit exactly minimizes the cost over the model for the
        // incoming states/modes, and the state fit exactly minimizes it over
        // the states for the updated model/modes. The mode search in between
        // scores candidate sequences by local one-step residuals, so it is
        // the one step allowed to raise the cost transiently.
        CHECK(r.step_costs[i][0] <= r.cost_trace[i] + 1e-9);
        CHECK(r.step_costs[i][2] <= r.step_costs[i][1] + 1e-9);
        CHECK(r.cost_trace[i + 1] == doctest::Approx(r.step_costs[i][2]));
    }

    // The run as a whole descends far below the initial cost.
    CHECK(r.cost_trace.back() < 0.5 * r.cost_trace.front());
    CHECK(r.final_cost.total == doctest::Approx(r.cost_trace.back()).epsilon(1e-15));
}

TEST_CASE("coordinate_descent: reported cost matches an independent evaluation") {
    const SampledDataset d = generate_benchmark_dataset(120, 0.01, 0.1, 0.025, 8);
    const FitConfig c = small_config();
    const StateTrajectory x0 = initialize_states(d, 2, 0.01, 4);
    const ModeSequence s0 = initialize_modes(2, 120, 5);

    const FitResult r = coordinate_descent(d, c, x0, s0);
    const CostBreakdown check =
        evaluate_cost(r.model, r.states, r.modes, d, c.alpha, c.mode_loss);
    CHECK(r.final_cost.total == doctest::Approx(check.total).epsilon(1e-10));
}

TEST_CASE("coordinate_descent: noise-free single-mode data is fit almost exactly") {
    // Mode 1 of the benchmark system only, no switching, no noise.
    SampledDataset d = generate_benchmark_dataset(200, 0.01, 0.0, 0.0, 6);
    FitConfig c = small_config(1);
    c.mode_loss = ModeLossSpec::zero(1);
    c.n_max = 200;
    const StateTrajectory x0 = initialize_states(d, 2, 0.0, 1);
    const ModeSequence s0(200, 1);

    const FitResult r = coordinate_descent(d, c, x0, s0);
    const CostBreakdown cost =
        evaluate_cost(r.model, r.states, r.modes, d, c.alpha, c.mode_loss);
    CHECK(cost.output_fit <= 1e-6 * d.y.squaredNorm());
}

TEST_CASE("coordinate_descent: infinite tolerance stops after one iteration") {
    const SampledDataset d = generate_benchmark_dataset(80, 0.01, 0.1, 0.025, 9);
    FitConfig c = small_config();
    c.eps = std::numeric_limits<double>::infinity();
    const StateTrajectory x0 = initialize_states(d, 2, 0.01, 1);
    const ModeSequence s0 = initialize_modes(2, 80, 2);

    const FitResult r = coordinate_descent(d, c, x0, s0);
    CHECK(r.iterations == 1);
    CHECK(r.termination == Termination::Tolerance);
}

TEST_CASE("coordinate_descent: n_max = 1 reports max-iterations when not converged") {
    const SampledDataset d = generate_benchmark_dataset(80, 0.01, 0.1, 0.025, 10);
    FitConfig c = small_config();
    c.n_max = 1;
    c.eps = 0.0;
    const StateTrajectory x0 = initialize_states(d, 2, 0.01, 1);
    const ModeSequence s0 = initialize_modes(2, 80, 2);

    const FitResult r = coordinate_descent(d, c, x0, s0);
    CHECK(r.iterations == 1);
    CHECK(r.termination == Termination::MaxIterations);
}

TEST_CASE("coordinate_descent is deterministic given identical inputs") {
    const SampledDataset d = generate_benchmark_dataset(100, 0.01, 0.1, 0.025, 12);
    const FitConfig c = small_config();
    const StateTrajectory x0 = initialize_states(d, 2, 0.01, 6);
    const ModeSequence s0 = initialize_modes(2, 100, 7);

    const FitResult a = coordinate_descent(d, c, x0, s0);
    const FitResult b = coordinate_descent(d, c, x0, s0);
    CHECK(a.final_cost.total == b.final_cost.total);
    CHECK(a.modes == b.modes);
    CHECK((a.states - b.states).norm() == 0.0);
    for (int i = 0; i < 2; ++i) CHECK((a.model.A[i] - b.model.A[i]).norm() == 0.0);
}

TEST_CASE("multistart_fit: picks the run with the best open-loop training BFR") {
    const SampledDataset d = generate_benchmark_dataset(120, 0.01, 0.1, 0.025, 13);
    FitConfig c = small_config();
    c.restarts = 3;
    c.n_max = 20;

    const MultistartResult r = multistart_fit(d, c);
    CHECK(r.runs.size() == 3);
    REQUIRE(r.best_index >= 0);
    REQUIRE(r.best_index < 3);

    auto training_bfr = [&](const FitResult& run) {
        return bfr(open_loop_outputs(run.model, d, run.modes, run.states.row(0).transpose()),
                   d.y);
    };
    const double best = training_bfr(r.best);
    for (const FitResult& run : r.runs) CHECK(best >= training_bfr(run) - 1e-12);
    CHECK(best == doctest::Approx(training_bfr(r.runs[r.best_index])));
}

TEST_CASE("multistart_fit is deterministic for a fixed master seed") {
    const SampledDataset d = generate_benchmark_dataset(80, 0.01, 0.1, 0.025, 14);
    FitConfig c = small_config();
    c.restarts = 2;
    c.n_max = 10;
    const MultistartResult a = multistart_fit(d, c);
    const MultistartResult b = multistart_fit(d, c);
    CHECK(a.best_index == b.best_index);
    CHECK(a.best.final_cost.total == b.best.final_cost.total);
    CHECK(a.best.modes == b.best.modes);
}
