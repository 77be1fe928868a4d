#include <doctest.h>

#include "test_helpers.hpp"

using namespace lssid;

namespace {

// Independent reference for the recursive integral block: plain cumulative sum
// of dt * (A x + B u) evaluated at the fed states.
Mat cumulative_sum_oracle(const EstimatedModel& model, const StateTrajectory& states,
                          const Mat& u, const ModeSequence& modes, const Vec& t) {
    const int n = static_cast<int>(t.size());
    Mat xi(n, model.nx);
    xi.row(0) = states.row(0);
    Vec acc = states.row(0).transpose();
    for (int k = 0; k + 1 < n; ++k) {
        const double dt = t[k + 1] - t[k];
        const int s = modes[k] - 1;
        acc += dt * (model.A[s] * states.row(k).transpose() +
                     model.B[s] * u.row(k).transpose());
        xi.row(k + 1) = acc.transpose();
    }
    return xi;
}

}  // namespace

TEST_CASE("propagate_integral_states: zero dynamics keep the initial state") {
    Rng rng(1);
    EstimatedModel model = EstimatedModel::zero(2, 3, 1, 1);
    const int n = 10;
    SampledDataset d = test::random_dataset(rng, n, 1, 1);
    const StateTrajectory states = test::random_matrix(rng, n, 3);
    const ModeSequence modes = test::random_modes(rng, 2, n);
    const Mat xi = propagate_integral_states(model, states, d.u, modes, d.t);
    for (int k = 0; k < n; ++k)
        CHECK((xi.row(k) - states.row(0)).norm() == doctest::Approx(0.0));
}

TEST_CASE("propagate_integral_states: constant unit derivative gives a Riemann ramp") {
    // A = 0, B = 1, u = 1 so the integrand is identically one.
    EstimatedModel model = EstimatedModel::zero(1, 1, 1, 1);
    model.B[0](0, 0) = 1.0;
    const int n = 11;
    const Vec t = Vec::LinSpaced(n, 0.0, 1.0);
    const Mat u = Mat::Ones(n, 1);
    const StateTrajectory states = Mat::Zero(n, 1);
    const ModeSequence modes(n, 1);
    const Mat xi = propagate_integral_states(model, states, u, modes, t);
    for (int k = 0; k < n; ++k)
        CHECK(xi(k, 0) == doctest::Approx(0.1 * k).epsilon(1e-12));
}

TEST_CASE("propagate_integral_states matches a cumulative-sum oracle") {
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = rng.uniform_int(3, 30);
        const int nx = rng.uniform_int(1, 3);
        const int nu = rng.uniform_int(1, 2);
        const int num_modes = rng.uniform_int(1, 3);
        const EstimatedModel model = test::random_model(rng, num_modes, nx, nu, 1);
        SampledDataset d = test::random_dataset(rng, n, nu, 1);
        const StateTrajectory states = test::random_matrix(rng, n, nx);
        const ModeSequence modes = test::random_modes(rng, num_modes, n);
        const Mat xi = propagate_integral_states(model, states, d.u, modes, d.t);
        const Mat oracle = cumulative_sum_oracle(model, states, d.u, modes, d.t);
        CHECK((xi - oracle).norm() < 1e-12 * (1.0 + oracle.norm()));
    }
}

TEST_CASE("exact Euler states make the state regularizer vanish") {
    Rng rng(3);
    const EstimatedModel model = test::random_model(rng, 2, 2, 1, 1, 0.3);
    const int n = 15;
    SampledDataset d = test::random_dataset(rng, n, 1, 1);
    const ModeSequence modes = test::random_modes(rng, 2, n);

    // Generate states by the explicit Euler recursion the integral block encodes.
    StateTrajectory states(n, 2);
    states.row(0) = test::random_matrix(rng, 1, 2);
    for (int k = 0; k + 1 < n; ++k) {
        const double dt = d.t[k + 1] - d.t[k];
        const int s = modes[k] - 1;
        states.row(k + 1) = states.row(k) +
                            dt * (model.A[s] * states.row(k).transpose() +
                                  model.B[s] * d.u.row(k).transpose())
                                     .transpose();
    }
    d.y = states * model.C.transpose();

    const CostBreakdown cost = evaluate_cost(model, states, modes, d, 0.5, ModeLossSpec::zero(2));
    CHECK(cost.state_reg == doctest::Approx(0.0));
    CHECK(cost.output_fit == doctest::Approx(0.0));
    CHECK(cost.total == doctest::Approx(0.0));
}

TEST_CASE("integral propagation is linear in the fed trajectory and input") {
    Rng rng(4);
    const EstimatedModel model = test::random_model(rng, 2, 2, 1, 1);
    const int n = 12;
    SampledDataset d = test::random_dataset(rng, n, 1, 1);
    const ModeSequence modes = test::random_modes(rng, 2, n);
    const StateTrajectory xa = test::random_matrix(rng, n, 2);
    const StateTrajectory xb = test::random_matrix(rng, n, 2);
    const Mat ua = d.u;
    const Mat ub = test::random_matrix(rng, n, 1);

    const Mat lhs = propagate_integral_states(model, xa + 2.0 * xb, ua + 2.0 * ub, modes, d.t);
    const Mat rhs = propagate_integral_states(model, xa, ua, modes, d.t) +
                    2.0 * propagate_integral_states(model, xb, ub, modes, d.t);
    CHECK((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
}

TEST_CASE("mode_sequence_loss sums initial, per-sample, and transition terms") {
    ModeLossSpec loss = ModeLossSpec::zero(2);
    loss.init_cost = (Vec(2) << 0.5, 0.25).finished();
    loss.mode_cost = (Vec(2) << 0.125, 0.0625).finished();
    loss.trans_cost = (Mat(2, 2) << 0.0, 3.0, 7.0, 0.0).finished();

    // trans_cost(j-1, i-1) is the cost of moving from mode i to mode j.
    const ModeSequence modes = {1, 2, 2, 1};
    // init: 0.5 (mode 1)
    // samples k = 1..3: 0.0625 + 0.0625 + 0.125 = 0.25
    // transitions: 1->2 (7) + 2->2 (0) + 2->1 (3) = 10
    CHECK(mode_sequence_loss(modes, loss) == doctest::Approx(10.75).epsilon(1e-15));
}

TEST_CASE("evaluate_cost: total is the sum of its parts") {
    Rng rng(5);
    const EstimatedModel model = test::random_model(rng, 2, 2, 1, 1);
    const int n = 20;
    SampledDataset d = test::random_dataset(rng, n, 1, 1);
    const StateTrajectory states = test::random_matrix(rng, n, 2);
    const ModeSequence modes = test::random_modes(rng, 2, n);
    const ModeLossSpec loss = markov_mode_loss(2, 0.1, 1e-3);

    const CostBreakdown cost = evaluate_cost(model, states, modes, d, 0.01, loss);
    CHECK(cost.total ==
          doctest::Approx(cost.output_fit + 0.01 * cost.state_reg + cost.mode_loss)
              .epsilon(1e-14));
    CHECK(cost.mode_loss == doctest::Approx(mode_sequence_loss(modes, loss)).epsilon(1e-14));
    CHECK(cost.output_fit >= 0.0);
    CHECK(cost.state_reg >= 0.0);
}

TEST_CASE("evaluate_cost: independent straight-line oracle") {
    // Scalar model dx/dt = 1 (A = 0, B = 1, u = 1), C = 1, states x_k = t_k,
    // measurements y = 0, uniform grid. The integral trajectory equals the
    // left Riemann sum of 1, which is exactly t_k, so J_x = 0 and
    // J_y = sum t_k^2.
    EstimatedModel model = EstimatedModel::zero(1, 1, 1, 1);
    model.B[0](0, 0) = 1.0;
    model.C(0, 0) = 1.0;
    const int n = 9;
    SampledDataset d;
    d.t = Vec::LinSpaced(n, 0.0, 2.0);
    d.u = Mat::Ones(n, 1);
    d.y = Mat::Zero(n, 1);
    StateTrajectory states(n, 1);
    states.col(0) = d.t;
    const ModeSequence modes(n, 1);

    const CostBreakdown cost = evaluate_cost(model, states, modes, d, 0.7, ModeLossSpec::zero(1));
    CHECK(cost.state_reg == doctest::Approx(0.0));
    CHECK(cost.output_fit == doctest::Approx(d.t.squaredNorm()).epsilon(1e-14));
}

TEST_CASE("state regularizer shrinks O(dt^2) under grid refinement for smooth data") {
    // Fix a smooth continuous-time trajectory x(t) = sin(t) and the model
    // dx/dt = u with u_k = cos(t_k). The accumulated rectangular-rule defect
    // grows like O(dt) pointwise, so J_x ~ integral of the squared defect is
    // O(dt^2): halving dt should cut it by roughly four.
    auto jx = [](int n) {
        EstimatedModel model = EstimatedModel::zero(1, 1, 1, 1);
        model.B[0](0, 0) = 1.0;
        SampledDataset d;
        d.t = Vec::LinSpaced(n, 0.0, 2.0);
        d.u = d.t.array().cos().matrix();
        d.y = Mat::Zero(n, 1);
        StateTrajectory states(n, 1);
        states.col(0) = d.t.array().sin().matrix();
        const ModeSequence modes(n, 1);
        const CostBreakdown cost =
            evaluate_cost(model, states, modes, d, 1.0, ModeLossSpec::zero(1));
        return cost.state_reg;
    };

    const double coarse = jx(101);
    const double fine = jx(201);
    const double factor = coarse / fine;
    CHECK(factor >= 3.2);
    CHECK(factor <= 4.8);
}
