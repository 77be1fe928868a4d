#ifndef LSSID_INTEGRAL_HPP
#define LSSID_INTEGRAL_HPP

#include "lssid/types.hpp"

namespace lssid {

/// dx/dt = A_s x + B_s u for the active mode s.
Vec state_derivative(const EstimatedModel& model, const Vec& x, const Vec& u, int mode);

/// y = C x (D is identically zero in the estimated model).
Vec model_output(const EstimatedModel& model, const Vec& x, const Vec& u, int mode);

/// Rectangular-rule integral block, recursive form:
///   xI(t_0)     = x(t_0)
///   xI(t_{k+1}) = xI(t_k) + dt_{k+1} (A_{s(t_k)} x(t_k) + B_{s(t_k)} u(t_k))
/// The derivative is always evaluated at the fed state x, never at xI.
Mat propagate_integral_states(const EstimatedModel& model, const StateTrajectory& states,
                              const Mat& u_samples, const ModeSequence& modes,
                              const Vec& timestamps);

/// Additive mode loss over a sequence: L^init(s_0) + sum_{k>=1} L^mode(s_k)
/// + sum_{k>=1} L^trans(s_k, s_{k-1}).
double mode_sequence_loss(const ModeSequence& modes, const ModeLossSpec& loss);

/// J = J_y + alpha J_x + L(S) with
///   J_y = sum_k |C x(t_k) - y(t_k)|^2
///   J_x = sum_{k>=1} |xI(t_k) - x(t_k)|^2 dt_k
CostBreakdown evaluate_cost(const EstimatedModel& model, const StateTrajectory& states,
                            const ModeSequence& modes, const SampledDataset& dataset,
                            double alpha, const ModeLossSpec& loss);

}  // namespace lssid

#endif
