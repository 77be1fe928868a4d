#ifndef LSSID_METRICS_HPP
#define LSSID_METRICS_HPP

#include <utility>
#include <vector>

#include "lssid/types.hpp"

namespace lssid {

/// Best fit rate in percent, per channel averaged uniformly:
///   BFR = 100 (1 - sqrt(sum (yhat - y)^2 / sum (y - mean(y))^2)).
/// Throws if y is constant in some channel.
double bfr(const Mat& yhat, const Mat& y);

struct ModeFitResult {
    double percent = 0;
    std::vector<int> permutation;  // permutation[i-1] = relabeling of estimated mode i
};

/// Fraction of matching labels in percent. With match_labels the index is
/// maximized over all K! relabelings of the estimated sequence.
ModeFitResult mode_fit(const ModeSequence& estimated, const ModeSequence& truth,
                       bool match_labels = true);

/// SISO continuous-time transfer function. den is monic of length nx+1
/// (descending powers); num has length nx (strictly proper, descending).
struct TransferFunction {
    Vec num;
    Vec den;
};

/// Faddeev-LeVerrier: den = char. polynomial of A, num from C adj(sI - A) B.
TransferFunction ss_to_tf(const Mat& A, const Vec& B, const Eigen::RowVectorXd& C);

/// Magnitude (dB) and phase (degrees, unwrapped along the grid) of G(jw).
std::pair<Vec, Vec> frequency_response(const TransferFunction& tf, const Vec& omega_grid);

struct ModeCoefficientErrors {
    Vec num_rel_err;  // per numerator coefficient
    Vec den_rel_err;  // per non-leading denominator coefficient
    double max_rel_err = 0;
};

/// Per-mode per-coefficient relative transfer-function errors after applying
/// the mode relabeling permutation (comparison is realization-invariant).
std::vector<ModeCoefficientErrors> compare_models(const EstimatedModel& estimated,
                                                  const SwitchedSystem& truth,
                                                  const std::vector<int>& permutation);

/// yhat(t_k) = C x(t_k), the output the cost J_y penalizes.
Mat predicted_outputs(const EstimatedModel& model, const StateTrajectory& states);

/// Open-loop forward-Euler resimulation of the fitted model over the dataset
/// inputs and a given mode sequence (also used to score restarts).
Mat open_loop_outputs(const EstimatedModel& model, const SampledDataset& dataset,
                      const ModeSequence& modes, const Vec& x0);

}  // namespace lssid

#endif
