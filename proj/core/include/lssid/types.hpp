#ifndef LSSID_TYPES_HPP
#define LSSID_TYPES_HPP

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace lssid {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Mode labels are 1-based ({1..K}) in every interface.
using ModeSequence = std::vector<int>;

/// Estimated state trajectory; row k is the state at t_k (N x nx).
using StateTrajectory = Eigen::MatrixXd;

struct ValidationError : std::runtime_error {
    enum class Kind { DimensionMismatch, NonMonotoneTimestamps, TooShort, ModeOutOfRange };
    Kind kind;
    ValidationError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

/// True continuous-time switched generator: per-mode (A,B,C,D).
struct SwitchedSystem {
    int num_modes = 0;
    int nx = 0, nu = 0, ny = 0;
    std::vector<Mat> A, B, C, D;

    void validate() const;
};

/// Identified model: per-mode (A,B), shared C, D fixed to zero.
struct EstimatedModel {
    int num_modes = 0;
    int nx = 0, nu = 0;
    std::vector<Mat> A, B;  // A[i]: nx x nx, B[i]: nx x nu
    Mat C;                  // ny x nx, shared across modes

    int ny() const { return static_cast<int>(C.rows()); }
    int n_theta() const { return nx * (nx + nu); }

    static EstimatedModel zero(int num_modes, int nx, int nu, int ny);
    void validate() const;
};

struct SampledDataset {
    Vec t;           // N timestamps, strictly increasing
    Mat u;           // N x nu inputs
    Mat y;           // N x ny noisy outputs
    Mat y0;          // N x ny noise-free outputs, or 0x0 if absent
    Mat true_states; // N x nx, or 0x0 if absent
    ModeSequence true_modes; // N labels, or empty

    int size() const { return static_cast<int>(t.size()); }
    int nu() const { return static_cast<int>(u.cols()); }
    int ny() const { return static_cast<int>(y.cols()); }
    double dt(int k) const { return t[k] - t[k - 1]; }  // Delta t_k, k >= 1
};

/// Throws ValidationError unless all SampledDataset invariants hold.
void validate(const SampledDataset& dataset);

/// Initial / per-mode / transition cost tables for the mode loss.
/// trans_cost(j-1, i-1) is the cost of moving from mode i at t_{k-1}
/// to mode j at t_k.
struct ModeLossSpec {
    Vec init_cost;   // K
    Vec mode_cost;   // K
    Mat trans_cost;  // K x K

    int num_modes() const { return static_cast<int>(init_cost.size()); }
    static ModeLossSpec zero(int num_modes);
    void validate() const;
};

struct FitConfig {
    double alpha = 0.01;        // state-regularization weight, > 0
    ModeLossSpec mode_loss;     // built e.g. by markov_mode_loss()
    double eps = 1e-9;          // convergence tolerance on |J(n) - J(n-1)|
    int n_max = 1000;           // max BCD iterations
    int restarts = 5;           // multi-start count
    double sigma_x = 0.01;      // state-perturbation std for initialization
    std::uint64_t seed = 1;
    int num_modes = 2;          // K
    int nx = 2;

    void validate() const;
};

struct CostBreakdown {
    double total = 0;       // J
    double output_fit = 0;  // J_y
    double state_reg = 0;   // J_x (unscaled by alpha)
    double mode_loss = 0;   // L(S)
};

enum class Termination { Tolerance, MaxIterations };

struct FitResult {
    EstimatedModel model;
    ModeSequence modes;
    StateTrajectory states;
    std::vector<double> cost_trace;  // J(0), then J after each full iteration
    // J after step 1.1 / 1.2 / 1.3 of every iteration, for monotonicity checks.
    std::vector<std::array<double, 3>> step_costs;
    CostBreakdown final_cost;
    int iterations = 0;
    Termination termination = Termination::MaxIterations;
    bool rank_deficient = false;
};

}  // namespace lssid

#endif
