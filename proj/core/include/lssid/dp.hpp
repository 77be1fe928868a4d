#ifndef LSSID_DP_HPP
#define LSSID_DP_HPP

#include "lssid/types.hpp"

namespace lssid {

/// Markov transition loss: zero init/mode costs,
///   same-mode  cost = -tau log(1-pi)
///   switch     cost = -tau log(pi)      (negative log-likelihood convention)
/// With literal_sign = true the switch branch is +tau log(pi) instead,
/// which is negative for pi < 1, i.e. it rewards switching.
ModeLossSpec markov_mode_loss(int num_modes, double pi, double tau, bool literal_sign = false);

/// ell(k, i) = |x(t_{k+1}) - x(t_k) - dt_{k+1} A_i x(t_k) - dt_{k+1} B_i u(t_k)|^2,
/// defined for 0 <= k <= N-2.
double transition_cost(const EstimatedModel& model, const StateTrajectory& states,
                       const Mat& u_samples, int k, int mode, double dt);

/// Total sequence cost minimized by estimate_modes:
///   G(S) = L^init(s_0) + sum_{k=0}^{N-2} ell(k, s_k)
///        + sum_{k=1}^{N-1} [L^mode(s_k) + L^trans(s_k, s_{k-1})]
/// The data term is the raw one-step residual; the loss spec's scale (tau)
/// balances it against the switching prior.
double sequence_cost(const EstimatedModel& model, const StateTrajectory& states,
                     const SampledDataset& dataset, const ModeLossSpec& loss,
                     const ModeSequence& modes);

/// Global minimizer of G over all K^N sequences via backward dynamic
/// programming; ties break toward the smaller mode index. G is a
/// Markov-decomposable surrogate of the full cost J: its data term is local,
/// while the state regularizer in J is cumulative, so minimizing G may raise
/// J transiently until the states are re-fit for the new sequence.
ModeSequence estimate_modes(const EstimatedModel& model, const StateTrajectory& states,
                            const SampledDataset& dataset, const ModeLossSpec& loss);

}  // namespace lssid

#endif
