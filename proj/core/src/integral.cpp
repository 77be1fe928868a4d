#include "lssid/integral.hpp"

namespace lssid {

namespace {

void check_mode(const EstimatedModel& model, int mode) {
    if (mode < 1 || mode > model.num_modes)
        throw ValidationError(ValidationError::Kind::ModeOutOfRange, "mode label out of range");
}

}  // namespace

Vec state_derivative(const EstimatedModel& model, const Vec& x, const Vec& u, int mode) {
    check_mode(model, mode);
    return model.A[mode - 1] * x + model.B[mode - 1] * u;
}

Vec model_output(const EstimatedModel& model, const Vec& x, const Vec& u, int mode) {
    check_mode(model, mode);
    (void)u;  // D is identically zero
    return model.C * x;
}

Mat propagate_integral_states(const EstimatedModel& model, const StateTrajectory& states,
                              const Mat& u_samples, const ModeSequence& modes,
                              const Vec& timestamps) {
    const int n = static_cast<int>(timestamps.size());
    if (states.rows() != n || u_samples.rows() != n || static_cast<int>(modes.size()) != n ||
        states.cols() != model.nx || u_samples.cols() != model.nu)
        throw ValidationError(ValidationError::Kind::DimensionMismatch,
                              "inconsistent lengths in integral propagation");
    Mat xi(n, model.nx);
    Vec acc = states.row(0).transpose();  // xI(t_0) = x(t_0)
    xi.row(0) = acc.transpose();
    for (int k = 0; k + 1 < n; ++k) {
        check_mode(model, modes[k]);
        const int s = modes[k] - 1;
        const double dt = timestamps[k + 1] - timestamps[k];
        acc += dt * (model.A[s] * states.row(k).transpose() + model.B[s] * u_samples.row(k).transpose());
        xi.row(k + 1) = acc.transpose();
    }
    return xi;
}

double mode_sequence_loss(const ModeSequence& modes, const ModeLossSpec& loss) {
    if (modes.empty()) return 0.0;
    double total = loss.init_cost[modes[0] - 1];
    for (std::size_t k = 1; k < modes.size(); ++k) {
        total += loss.mode_cost[modes[k] - 1];
        total += loss.trans_cost(modes[k] - 1, modes[k - 1] - 1);
    }
    return total;
}

CostBreakdown evaluate_cost(const EstimatedModel& model, const StateTrajectory& states,
                            const ModeSequence& modes, const SampledDataset& dataset,
                            double alpha, const ModeLossSpec& loss) {
    const int n = dataset.size();
    if (states.rows() != n || static_cast<int>(modes.size()) != n)
        throw ValidationError(ValidationError::Kind::DimensionMismatch,
                              "inconsistent lengths in cost evaluation");

    CostBreakdown cost;
    cost.output_fit = (states * model.C.transpose() - dataset.y).squaredNorm();

    const Mat xi = propagate_integral_states(model, states, dataset.u, modes, dataset.t);
    for (int k = 1; k < n; ++k)
        cost.state_reg += (xi.row(k) - states.row(k)).squaredNorm() * dataset.dt(k);

    cost.mode_loss = mode_sequence_loss(modes, loss);
    cost.total = cost.output_fit + alpha * cost.state_reg + cost.mode_loss;
    return cost;
}

}  // namespace lssid
