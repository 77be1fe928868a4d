#include "lssid/types.hpp"

#include <cmath>
#include <sstream>

namespace lssid {

namespace {

void require(bool ok, ValidationError::Kind kind, const std::string& msg) {
    if (!ok) throw ValidationError(kind, msg);
}

}  // namespace

void SwitchedSystem::validate() const {
    require(num_modes >= 1, ValidationError::Kind::DimensionMismatch, "mode count must be >= 1");
    require(nx >= 1 && nu >= 1 && ny >= 1, ValidationError::Kind::DimensionMismatch,
            "dimensions must be >= 1");
    require(static_cast<int>(A.size()) == num_modes && static_cast<int>(B.size()) == num_modes &&
                static_cast<int>(C.size()) == num_modes && static_cast<int>(D.size()) == num_modes,
            ValidationError::Kind::DimensionMismatch, "one (A,B,C,D) tuple required per mode");
    for (int i = 0; i < num_modes; ++i) {
        require(A[i].rows() == nx && A[i].cols() == nx, ValidationError::Kind::DimensionMismatch,
                "A must be nx x nx in every mode");
        require(B[i].rows() == nx && B[i].cols() == nu, ValidationError::Kind::DimensionMismatch,
                "B must be nx x nu in every mode");
        require(C[i].rows() == ny && C[i].cols() == nx, ValidationError::Kind::DimensionMismatch,
                "C must be ny x nx in every mode");
        require(D[i].rows() == ny && D[i].cols() == nu, ValidationError::Kind::DimensionMismatch,
                "D must be ny x nu in every mode");
    }
}

EstimatedModel EstimatedModel::zero(int num_modes, int nx, int nu, int ny) {
    EstimatedModel m;
    m.num_modes = num_modes;
    m.nx = nx;
    m.nu = nu;
    m.A.assign(num_modes, Mat::Zero(nx, nx));
    m.B.assign(num_modes, Mat::Zero(nx, nu));
    m.C = Mat::Zero(ny, nx);
    return m;
}

void EstimatedModel::validate() const {
    require(num_modes >= 1, ValidationError::Kind::DimensionMismatch, "mode count must be >= 1");
    require(nx >= 1 && nu >= 1, ValidationError::Kind::DimensionMismatch, "dimensions must be >= 1");
    require(static_cast<int>(A.size()) == num_modes && static_cast<int>(B.size()) == num_modes,
            ValidationError::Kind::DimensionMismatch, "one (A,B) pair required per mode");
    for (int i = 0; i < num_modes; ++i) {
        require(A[i].rows() == nx && A[i].cols() == nx, ValidationError::Kind::DimensionMismatch,
                "A must be nx x nx in every mode");
        require(B[i].rows() == nx && B[i].cols() == nu, ValidationError::Kind::DimensionMismatch,
                "B must be nx x nu in every mode");
    }
    require(C.cols() == nx && C.rows() >= 1, ValidationError::Kind::DimensionMismatch,
            "shared C must be ny x nx");
}

void validate(const SampledDataset& dataset) {
    const int n = dataset.size();
    if (n < 2) throw ValidationError(ValidationError::Kind::TooShort, "dataset needs N >= 2 samples");
    if (dataset.u.rows() != n || dataset.y.rows() != n) {
        std::ostringstream msg;
        msg << "dimension mismatch: N=" << n << " timestamps, " << dataset.u.rows()
            << " input rows, " << dataset.y.rows() << " output rows";
        throw ValidationError(ValidationError::Kind::DimensionMismatch, msg.str());
    }
    if (dataset.u.cols() < 1 || dataset.y.cols() < 1)
        throw ValidationError(ValidationError::Kind::DimensionMismatch,
                              "dataset needs at least one input and one output channel");
    if (dataset.y0.size() != 0 && (dataset.y0.rows() != n || dataset.y0.cols() != dataset.y.cols()))
        throw ValidationError(ValidationError::Kind::DimensionMismatch,
                              "noise-free outputs must match the output shape");
    if (dataset.true_states.size() != 0 && dataset.true_states.rows() != n)
        throw ValidationError(ValidationError::Kind::DimensionMismatch,
                              "true states must have one row per sample");
    if (!dataset.true_modes.empty() && static_cast<int>(dataset.true_modes.size()) != n)
        throw ValidationError(ValidationError::Kind::DimensionMismatch,
                              "true modes must have one label per sample");
    for (int k = 1; k < n; ++k) {
        if (!(dataset.t[k] > dataset.t[k - 1])) {
            std::ostringstream msg;
            msg << "timestamps not strictly increasing at index " << k << " (" << dataset.t[k - 1]
                << " -> " << dataset.t[k] << ")";
            throw ValidationError(ValidationError::Kind::NonMonotoneTimestamps, msg.str());
        }
    }
}

ModeLossSpec ModeLossSpec::zero(int num_modes) {
    ModeLossSpec loss;
    loss.init_cost = Vec::Zero(num_modes);
    loss.mode_cost = Vec::Zero(num_modes);
    loss.trans_cost = Mat::Zero(num_modes, num_modes);
    return loss;
}

void ModeLossSpec::validate() const {
    const int k = num_modes();
    require(k >= 1, ValidationError::Kind::DimensionMismatch, "mode loss needs K >= 1");
    require(mode_cost.size() == k && trans_cost.rows() == k && trans_cost.cols() == k,
            ValidationError::Kind::DimensionMismatch, "mode loss tables must agree on K");
    require(init_cost.allFinite() && mode_cost.allFinite() && trans_cost.allFinite(),
            ValidationError::Kind::DimensionMismatch, "mode loss entries must be finite");
}

void FitConfig::validate() const {
    require(alpha > 0, ValidationError::Kind::DimensionMismatch, "alpha must be > 0");
    require(eps >= 0, ValidationError::Kind::DimensionMismatch, "eps must be >= 0");
    require(n_max >= 1, ValidationError::Kind::DimensionMismatch, "n_max must be >= 1");
    require(restarts >= 1, ValidationError::Kind::DimensionMismatch, "restarts must be >= 1");
    require(sigma_x >= 0, ValidationError::Kind::DimensionMismatch, "sigma_x must be >= 0");
    require(num_modes >= 1 && nx >= 1, ValidationError::Kind::DimensionMismatch,
            "model orders must be >= 1");
    mode_loss.validate();
    require(mode_loss.num_modes() == num_modes, ValidationError::Kind::DimensionMismatch,
            "mode loss K must match config K");
}

}  // namespace lssid
