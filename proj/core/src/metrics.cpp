#include "lssid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace lssid {

double bfr(const Mat& yhat, const Mat& y) {
    if (yhat.rows() != y.rows() || yhat.cols() != y.cols() || y.rows() < 2)
        throw ValidationError(ValidationError::Kind::DimensionMismatch,
                              "bfr needs equal-length sequences with N >= 2");
    double total = 0;
    for (int c = 0; c < y.cols(); ++c) {
        const double mean = y.col(c).mean();
        const double denom = (y.col(c).array() - mean).square().sum();
        if (denom == 0.0)
            throw std::runtime_error("bfr undefined: output channel is constant");
        const double num = (yhat.col(c) - y.col(c)).squaredNorm();
        total += 100.0 * (1.0 - std::sqrt(num / denom));
    }
    return total / y.cols();
}

ModeFitResult mode_fit(const ModeSequence& estimated, const ModeSequence& truth,
                       bool match_labels) {
    if (estimated.size() != truth.size() || estimated.empty())
        throw ValidationError(ValidationError::Kind::DimensionMismatch,
                              "mode sequences must have equal nonzero length");
    int num_modes = 1;
    for (int m : estimated) num_modes = std::max(num_modes, m);
    for (int m : truth) num_modes = std::max(num_modes, m);
    if (num_modes > 8) throw std::runtime_error("label matching supports K <= 8");

    const double scale = 100.0 / static_cast<double>(estimated.size());
    std::vector<int> perm(num_modes);
    std::iota(perm.begin(), perm.end(), 1);

    auto score = [&](const std::vector<int>& p) {
        int hits = 0;
        for (std::size_t k = 0; k < estimated.size(); ++k)
            if (p[estimated[k] - 1] == truth[k]) ++hits;
        return hits * scale;
    };

    ModeFitResult result;
    result.permutation = perm;
    result.percent = score(perm);
    if (match_labels) {
        std::vector<int> p = perm;
        std::sort(p.begin(), p.end());
        do {
            const double s = score(p);
            if (s > result.percent) {
                result.percent = s;
                result.permutation = p;
            }
        } while (std::next_permutation(p.begin(), p.end()));
    }
    return result;
}

TransferFunction ss_to_tf(const Mat& A, const Vec& B, const Eigen::RowVectorXd& C) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n || B.size() != n || C.size() != n || n < 1 || n > 6)
        throw ValidationError(ValidationError::Kind::DimensionMismatch,
                              "ss_to_tf expects SISO with 1 <= nx <= 6");

    TransferFunction tf;
    tf.den = Vec(n + 1);
    tf.num = Vec(n);
    tf.den[0] = 1.0;

    // Faddeev-LeVerrier: den coefficients c_k, adj(sI - A) = sum_k s^{n-1-k} M_{k+1}
    Mat m = Mat::Identity(n, n);
    for (int k = 1; k <= n; ++k) {
        tf.num[k - 1] = C * m * B;
        const Mat am = A * m;
        const double c = -am.trace() / k;
        tf.den[k] = c;
        m = am + c * Mat::Identity(n, n);
    }
    return tf;
}

namespace {

std::complex<double> polyval(const Vec& coeffs, std::complex<double> s) {
    std::complex<double> acc = 0.0;
    for (int i = 0; i < coeffs.size(); ++i) acc = acc * s + coeffs[i];
    return acc;
}

}  // namespace

std::pair<Vec, Vec> frequency_response(const TransferFunction& tf, const Vec& omega_grid) {
    const int n = static_cast<int>(omega_grid.size());
    Vec mag_db(n), phase_deg(n);
    for (int i = 0; i < n; ++i) {
        const std::complex<double> s(0.0, omega_grid[i]);
        const std::complex<double> g = polyval(tf.num, s) / polyval(tf.den, s);
        mag_db[i] = 20.0 * std::log10(std::abs(g));
        double phase = std::arg(g) * 180.0 / M_PI;
        if (i > 0) {
            // continue to the nearest multiple of 360
            phase += 360.0 * std::round((phase_deg[i - 1] - phase) / 360.0);
        }
        phase_deg[i] = phase;
    }
    return {std::move(mag_db), std::move(phase_deg)};
}

std::vector<ModeCoefficientErrors> compare_models(const EstimatedModel& estimated,
                                                  const SwitchedSystem& truth,
                                                  const std::vector<int>& permutation) {
    if (estimated.num_modes != truth.num_modes ||
        static_cast<int>(permutation.size()) != truth.num_modes)
        throw ValidationError(ValidationError::Kind::DimensionMismatch,
                              "mode counts must agree in model comparison");
    if (truth.nu != 1 || truth.ny != 1 || estimated.nu != 1 || estimated.ny() != 1)
        throw ValidationError(ValidationError::Kind::DimensionMismatch,
                              "model comparison is SISO only");

    auto rel = [](double est, double ref) {
        const double denom = std::max(std::abs(ref), 1e-12);
        return std::abs(est - ref) / denom;
    };

    std::vector<ModeCoefficientErrors> errors(truth.num_modes);
    for (int i = 1; i <= estimated.num_modes; ++i) {
        const int true_mode = permutation[i - 1];
        const TransferFunction est_tf =
            ss_to_tf(estimated.A[i - 1], estimated.B[i - 1].col(0), estimated.C.row(0));
        const TransferFunction true_tf = ss_to_tf(truth.A[true_mode - 1], truth.B[true_mode - 1].col(0),
                                                  truth.C[true_mode - 1].row(0));
        ModeCoefficientErrors e;
        e.num_rel_err = Vec(est_tf.num.size());
        for (int c = 0; c < est_tf.num.size(); ++c)
            e.num_rel_err[c] = rel(est_tf.num[c], true_tf.num[c]);
        e.den_rel_err = Vec(est_tf.den.size() - 1);
        for (int c = 1; c < est_tf.den.size(); ++c)
            e.den_rel_err[c - 1] = rel(est_tf.den[c], true_tf.den[c]);
        e.max_rel_err = std::max(e.num_rel_err.maxCoeff(), e.den_rel_err.maxCoeff());
        errors[true_mode - 1] = std::move(e);
    }
    return errors;
}

Mat predicted_outputs(const EstimatedModel& model, const StateTrajectory& states) {
    return states * model.C.transpose();
}

Mat open_loop_outputs(const EstimatedModel& model, const SampledDataset& dataset,
                      const ModeSequence& modes, const Vec& x0) {
    const int n = dataset.size();
    Mat y(n, model.ny());
    Vec x = x0;
    for (int k = 0; k < n; ++k) {
        y.row(k) = (model.C * x).transpose();
        if (k + 1 == n) break;
        const int s = modes[k] - 1;
        x += dataset.dt(k + 1) *
             (model.A[s] * x + model.B[s] * dataset.u.row(k).transpose());
    }
    return y;
}

}  // namespace lssid
