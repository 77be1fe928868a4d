#include "lssid/dp.hpp"

#include <cmath>
#include <limits>

namespace lssid {

ModeLossSpec markov_mode_loss(int num_modes, double pi, double tau, bool literal_sign) {
    if (!(pi > 0.0 && pi < 1.0))
        throw ValidationError(ValidationError::Kind::DimensionMismatch,
                              "switch probability must lie in (0, 1)");
    if (tau < 0)
        throw ValidationError(ValidationError::Kind::DimensionMismatch, "tau must be >= 0");
    ModeLossSpec loss = ModeLossSpec::zero(num_modes);
    const double same = -tau * std::log1p(-pi);
    const double diff = literal_sign ? tau * std::log(pi) : -tau * std::log(pi);
    loss.trans_cost.setConstant(diff);
    loss.trans_cost.diagonal().setConstant(same);
    return loss;
}

double transition_cost(const EstimatedModel& model, const StateTrajectory& states,
                       const Mat& u_samples, int k, int mode, double dt) {
    if (k < 0 || k + 1 >= states.rows())
        throw ValidationError(ValidationError::Kind::DimensionMismatch,
                              "transition cost index out of range");
    if (mode < 1 || mode > model.num_modes)
        throw ValidationError(ValidationError::Kind::ModeOutOfRange, "mode label out of range");
    const Vec residual = states.row(k + 1).transpose() - states.row(k).transpose() -
                         dt * (model.A[mode - 1] * states.row(k).transpose() +
                               model.B[mode - 1] * u_samples.row(k).transpose());
    return residual.squaredNorm();
}

double sequence_cost(const EstimatedModel& model, const StateTrajectory& states,
                     const SampledDataset& dataset, const ModeLossSpec& loss,
                     const ModeSequence& modes) {
    const int n = dataset.size();
    double total = loss.init_cost[modes[0] - 1];
    for (int k = 0; k + 1 < n; ++k)
        total += transition_cost(model, states, dataset.u, k, modes[k], dataset.dt(k + 1));
    for (int k = 1; k < n; ++k) {
        total += loss.mode_cost[modes[k] - 1];
        total += loss.trans_cost(modes[k] - 1, modes[k - 1] - 1);
    }
    return total;
}

ModeSequence estimate_modes(const EstimatedModel& model, const StateTrajectory& states,
                            const SampledDataset& dataset, const ModeLossSpec& loss) {
    const int n = dataset.size();
    const int num_modes = model.num_modes;
    if (states.rows() != n)
        throw ValidationError(ValidationError::Kind::DimensionMismatch,
                              "states length must match dataset");

    // node cost at time k for mode i (data term + init/mode cost)
    Mat node = Mat::Zero(num_modes, n);
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < num_modes; ++i) {
            double c = (k == 0) ? loss.init_cost[i] : loss.mode_cost[i];
            if (k + 1 < n)
                c += transition_cost(model, states, dataset.u, k, i + 1, dataset.dt(k + 1));
            node(i, k) = c;
        }
    }

    // backward value table V and best-successor table U
    Mat value(num_modes, n);
    Eigen::MatrixXi succ = Eigen::MatrixXi::Zero(num_modes, n);
    value.col(n - 1) = node.col(n - 1);
    for (int k = n - 2; k >= 0; --k) {
        for (int i = 0; i < num_modes; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_j = 0;
            for (int j = 0; j < num_modes; ++j) {
                const double cand = value(j, k + 1) + loss.trans_cost(j, i);
                if (cand < best) {  // ties keep the smaller mode index
                    best = cand;
                    best_j = j;
                }
            }
            value(i, k) = node(i, k) + best;
            succ(i, k) = best_j;
        }
    }

    ModeSequence modes(n);
    int s = 0;
    for (int i = 1; i < num_modes; ++i)
        if (value(i, 0) < value(s, 0)) s = i;
    modes[0] = s + 1;
    for (int k = 1; k < n; ++k) {
        s = succ(s, k - 1);
        modes[k] = s + 1;
    }
    return modes;
}

}  // namespace lssid
