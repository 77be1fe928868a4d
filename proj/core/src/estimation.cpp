#include "lssid/estimation.hpp"

#include <cmath>

namespace lssid {

namespace {

void check_modes(const ModeSequence& modes, int num_modes) {
    for (int m : modes)
        if (m < 1 || m > num_modes)
            throw ValidationError(ValidationError::Kind::ModeOutOfRange, "mode label out of range");
}

// Column blocks of (Atilde - I) below the diagonal: col 0 is I + dt_1 A_{s_0},
// col j (1 <= j <= N-2) is dt_{j+1} A_{s_j}. Shared by all row blocks.
std::vector<Mat> dynamics_column_blocks(const EstimatedModel& model, const ModeSequence& modes,
                                        const SampledDataset& dataset) {
    const int n = dataset.size();
    std::vector<Mat> cols(n - 1);
    cols[0] = Mat::Identity(model.nx, model.nx) + dataset.dt(1) * model.A[modes[0] - 1];
    for (int j = 1; j + 1 < n; ++j) cols[j] = dataset.dt(j + 1) * model.A[modes[j] - 1];
    return cols;
}

// Btilde block k = sum_{j<k} dt_{j+1} B_{s_j} u(t_j).
Mat b_tilde_blocks(const EstimatedModel& model, const ModeSequence& modes,
                   const SampledDataset& dataset) {
    const int n = dataset.size();
    Mat blocks = Mat::Zero(n, model.nx);  // row k = Btilde block k
    Vec acc = Vec::Zero(model.nx);
    for (int k = 1; k < n; ++k) {
        acc += dataset.dt(k) * (model.B[modes[k - 1] - 1] * dataset.u.row(k - 1).transpose());
        blocks.row(k) = acc.transpose();
    }
    return blocks;
}

}  // namespace

Mat build_regressor(const Vec& x, const Vec& u, double dt) {
    const int nx = static_cast<int>(x.size());
    const int nu = static_cast<int>(u.size());
    Mat phi = Mat::Zero(nx * (nx + nu), nx);
    for (int i = 0; i < nx; ++i)
        phi.block(i * nx, 0, nx, nx) = dt * x[i] * Mat::Identity(nx, nx);
    for (int i = 0; i < nu; ++i)
        phi.block((nx + i) * nx, 0, nx, nx) = dt * u[i] * Mat::Identity(nx, nx);
    return phi;
}

Step1System build_parameter_system(const StateTrajectory& states, const ModeSequence& modes,
                                   const SampledDataset& dataset, int num_modes) {
    const int n = dataset.size();
    const int nx = static_cast<int>(states.cols());
    const int nu = dataset.nu();
    const int n_theta = nx * (nx + nu);
    if (states.rows() != n || static_cast<int>(modes.size()) != n)
        throw ValidationError(ValidationError::Kind::DimensionMismatch,
                              "inconsistent lengths in parameter system");
    check_modes(modes, num_modes);

    Step1System sys;
    sys.regressor = Mat::Zero((n - 1) * nx, num_modes * n_theta);
    sys.target = Vec((n - 1) * nx);
    sys.weights = Vec(n - 1);

    Mat running = Mat::Zero(nx, num_modes * n_theta);  // cumulative Psi Pbar row block
    for (int k = 1; k < n; ++k) {
        const int mode = modes[k - 1] - 1;
        const Mat phi = build_regressor(states.row(k - 1).transpose(),
                                        dataset.u.row(k - 1).transpose(), dataset.dt(k));
        running.block(0, mode * n_theta, nx, n_theta) += phi.transpose();
        sys.regressor.block((k - 1) * nx, 0, nx, num_modes * n_theta) = running;
        sys.target.segment((k - 1) * nx, nx) = (states.row(k) - states.row(0)).transpose();
        sys.weights[k - 1] = dataset.dt(k);
    }
    return sys;
}

ParameterFit fit_parameters(const StateTrajectory& states, const ModeSequence& modes,
                            const SampledDataset& dataset, double alpha, int num_modes) {
    (void)alpha;  // the two Step 1.1 sub-problems decouple; alpha scales both sides
    const int n = dataset.size();
    const int nx = static_cast<int>(states.cols());
    const int nu = dataset.nu();
    const int n_theta = nx * (nx + nu);

    Step1System sys = build_parameter_system(states, modes, dataset, num_modes);
    Mat a = sys.regressor;
    Vec b = sys.target;
    for (int k = 0; k + 1 < n; ++k) {
        const double w = std::sqrt(sys.weights[k]);
        a.middleRows(k * nx, nx) *= w;
        b.segment(k * nx, nx) *= w;
    }
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(a);
    const Vec theta = cod.solve(b);

    ParameterFit fit;
    fit.rank_deficient = cod.rank() < a.cols();
    fit.mode_visited.assign(num_modes, false);
    for (int k = 0; k + 1 < n; ++k) fit.mode_visited[modes[k] - 1] = true;

    fit.model.num_modes = num_modes;
    fit.model.nx = nx;
    fit.model.nu = nu;
    fit.model.A.resize(num_modes);
    fit.model.B.resize(num_modes);
    for (int i = 0; i < num_modes; ++i) {
        // theta_i = [vec(A_i); vec(B_i)], column-major
        fit.model.A[i] = Mat(nx, nx);
        fit.model.B[i] = Mat(nx, nu);
        const int base = i * n_theta;
        for (int c = 0; c < nx; ++c)
            for (int r = 0; r < nx; ++r) fit.model.A[i](r, c) = theta[base + c * nx + r];
        for (int c = 0; c < nu; ++c)
            for (int r = 0; r < nx; ++r) fit.model.B[i](r, c) = theta[base + nx * nx + c * nx + r];
    }

    // C from |C x - y|^2: one row of states per sample, solved channel-wise.
    Eigen::CompleteOrthogonalDecomposition<Mat> cod_c(states);
    fit.model.C = cod_c.solve(dataset.y).transpose();
    fit.rank_deficient = fit.rank_deficient || cod_c.rank() < nx;
    return fit;
}

Step3System build_state_system(const EstimatedModel& model, const ModeSequence& modes,
                               const SampledDataset& dataset) {
    const int n = dataset.size();
    const int nx = model.nx;
    if (static_cast<int>(modes.size()) != n)
        throw ValidationError(ValidationError::Kind::DimensionMismatch, "modes length must be N");
    check_modes(modes, model.num_modes);

    Step3System sys;
    sys.a_tilde = Mat::Zero(n * nx, n * nx);
    sys.a_tilde.block(0, 0, nx, nx) = Mat::Identity(nx, nx);
    const std::vector<Mat> cols = dynamics_column_blocks(model, modes, dataset);
    for (int k = 1; k < n; ++k)
        for (int j = 0; j < k; ++j) sys.a_tilde.block(k * nx, j * nx, nx, nx) = cols[j];

    const Mat bt = b_tilde_blocks(model, modes, dataset);
    sys.b_tilde = Vec(n * nx);
    for (int k = 0; k < n; ++k) sys.b_tilde.segment(k * nx, nx) = bt.row(k).transpose();
    return sys;
}

namespace {

StateFit fit_states_dense_qr(const EstimatedModel& model, const ModeSequence& modes,
                             const SampledDataset& dataset, double alpha) {
    const int n = dataset.size();
    const int nx = model.nx;
    const int ny = model.ny();
    const int unknowns = n * nx;

    const std::vector<Mat> cols = dynamics_column_blocks(model, modes, dataset);
    const Mat bt = b_tilde_blocks(model, modes, dataset);

    Mat a = Mat::Zero(n * ny + (n - 1) * nx, unknowns);
    Vec b = Vec::Zero(a.rows());
    for (int k = 0; k < n; ++k) {
        a.block(k * ny, k * nx, ny, nx) = model.C;
        b.segment(k * ny, ny) = dataset.y.row(k).transpose();
    }
    for (int k = 1; k < n; ++k) {
        const double w = std::sqrt(alpha * dataset.dt(k));
        const int row = n * ny + (k - 1) * nx;
        for (int j = 0; j < k; ++j) a.block(row, j * nx, nx, nx) = w * cols[j];
        a.block(row, k * nx, nx, nx) = -w * Mat::Identity(nx, nx);
        b.segment(row, nx) = -w * bt.row(k).transpose();
    }

    Eigen::CompleteOrthogonalDecomposition<Mat> cod(a);
    const Vec x = cod.solve(b);

    StateFit fit;
    fit.rank_deficient = cod.rank() < unknowns;
    fit.states = Mat(n, nx);
    for (int k = 0; k < n; ++k) fit.states.row(k) = x.segment(k * nx, nx).transpose();
    return fit;
}

// Structured assembly of the normal equations. The dynamics design matrix has
// identical column content across row blocks (cumulative form), so the Gram
// matrix reduces to suffix-weighted block products: O(N^2 nx^2) instead of
// O(N^3 nx^3).
bool fit_states_normal_equations(const EstimatedModel& model, const ModeSequence& modes,
                                 const SampledDataset& dataset, double alpha, StateFit& out) {
    const int n = dataset.size();
    const int nx = model.nx;
    const int unknowns = n * nx;

    const std::vector<Mat> cols = dynamics_column_blocks(model, modes, dataset);
    const Mat bt = b_tilde_blocks(model, modes, dataset);

    Vec w = Vec::Zero(n);  // w_k = dt_k, k = 1..N-1
    for (int k = 1; k < n; ++k) w[k] = dataset.dt(k);
    Vec tail = Vec::Zero(n + 1);  // tail[m] = sum_{k>=m} w_k
    for (int m = n - 1; m >= 1; --m) tail[m] = tail[m + 1] + w[m];

    Mat h = Mat::Zero(unknowns, unknowns);
    const Mat ctc = model.C.transpose() * model.C;
    for (int a = 0; a < n; ++a) {
        Mat diag = ctc;
        if (a >= 1) diag += alpha * w[a] * Mat::Identity(nx, nx);
        if (a <= n - 2) diag += alpha * tail[a + 1] * (cols[a].transpose() * cols[a]);
        h.block(a * nx, a * nx, nx, nx) = diag;
        for (int b = a + 1; b < n; ++b) {
            Mat blk = -alpha * w[b] * cols[a].transpose();
            if (b <= n - 2) blk += alpha * tail[b + 1] * (cols[a].transpose() * cols[b]);
            h.block(a * nx, b * nx, nx, nx) = blk;
            h.block(b * nx, a * nx, nx, nx) = blk.transpose();
        }
    }

    Vec rhs = Vec::Zero(unknowns);
    // suffix sums of w_k * Btilde_k
    Mat suffix = Mat::Zero(n + 1, nx);
    for (int k = n - 1; k >= 1; --k) suffix.row(k) = suffix.row(k + 1) + w[k] * bt.row(k);
    for (int a = 0; a < n; ++a) {
        Vec g = Vec::Zero(nx);
        if (a >= 1) g -= w[a] * bt.row(a).transpose();
        if (a <= n - 2) g += cols[a].transpose() * suffix.row(a + 1).transpose();
        rhs.segment(a * nx, nx) =
            model.C.transpose() * dataset.y.row(a).transpose() - alpha * g;
    }

    Eigen::LDLT<Mat> ldlt(h);
    if (ldlt.info() != Eigen::Success) return false;
    const Vec x = ldlt.solve(rhs);
    if (!x.allFinite()) return false;

    out.rank_deficient = false;
    out.states = Mat(n, nx);
    for (int k = 0; k < n; ++k) out.states.row(k) = x.segment(k * nx, nx).transpose();
    return true;
}

}  // namespace

StateFit fit_states(const EstimatedModel& model, const ModeSequence& modes,
                    const SampledDataset& dataset, double alpha, StateSolver solver) {
    model.validate();
    if (dataset.ny() != model.ny() || dataset.nu() != model.nu)
        throw ValidationError(ValidationError::Kind::DimensionMismatch,
                              "model dimensions do not match dataset");
    const int unknowns = dataset.size() * model.nx;
    if (solver == StateSolver::Auto)
        solver = unknowns > 400 ? StateSolver::NormalEquations : StateSolver::DenseQr;

    if (solver == StateSolver::NormalEquations) {
        StateFit fit;
        if (fit_states_normal_equations(model, modes, dataset, alpha, fit)) return fit;
        // singular normal equations: fall through to the min-norm QR path
    }
    return fit_states_dense_qr(model, modes, dataset, alpha);
}

}  // namespace lssid
