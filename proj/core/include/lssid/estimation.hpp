#ifndef LSSID_ESTIMATION_HPP
#define LSSID_ESTIMATION_HPP

#include <vector>

#include "lssid/types.hpp"

namespace lssid {

/// Phi(t_j) = dt_{j+1} [x(t_j); u(t_j)] (x) I_nx, an n_theta x nx matrix with
/// Phi^T theta_s = dt (A_s x + B_s u) under column-major vec convention,
/// theta_s = [vec(A_s); vec(B_s)].
Mat build_regressor(const Vec& x, const Vec& u, double dt);

/// Stacked least-squares system of the parameter fit:
///   regressor = Psi Pbar   ((N-1) nx  x  K n_theta)
///   target    = [x(t_k) - x(t_0)]_{k=1..N-1}
///   weights   = dt_k per block row (applied as sqrt(dt_k) row scaling).
struct Step1System {
    Mat regressor;
    Vec target;
    Vec weights;  // N-1 entries, one per nx-row block
};

Step1System build_parameter_system(const StateTrajectory& states, const ModeSequence& modes,
                                   const SampledDataset& dataset, int num_modes);

struct ParameterFit {
    EstimatedModel model;
    bool rank_deficient = false;
    std::vector<bool> mode_visited;  // per mode: appeared in s(t_0..t_{N-2})
};

/// Exact minimizer of the Step 1.1 least squares: theta minimizes the
/// dt-weighted dynamics residual (independent of C), C minimizes |C x - y|^2.
/// Rank-deficient systems resolve to the minimum-norm solution.
ParameterFit fit_parameters(const StateTrajectory& states, const ModeSequence& modes,
                            const SampledDataset& dataset, double alpha, int num_modes);

/// Dense stacked form of the Step 1.3 dynamics constraint, xI = Atilde x + Btilde.
struct Step3System {
    Mat a_tilde;  // N nx x N nx, block lower triangular
    Vec b_tilde;  // N nx
};

Step3System build_state_system(const EstimatedModel& model, const ModeSequence& modes,
                               const SampledDataset& dataset);

enum class StateSolver {
    Auto,             // NormalEquations above 400 unknowns, DenseQr otherwise
    DenseQr,          // complete orthogonal decomposition (min-norm)
    NormalEquations,  // structured suffix-sum assembly + LDLT
};

struct StateFit {
    StateTrajectory states;
    bool rank_deficient = false;
};

/// Exact minimizer of J(x) = |Ctilde x - y|^2 + alpha sum_k dt_k |row_k((Atilde-I)x + Btilde)|^2
/// over all N nx state unknowns.
StateFit fit_states(const EstimatedModel& model, const ModeSequence& modes,
                    const SampledDataset& dataset, double alpha,
                    StateSolver solver = StateSolver::Auto);

}  // namespace lssid

#endif
