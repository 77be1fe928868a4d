#ifndef LSSID_TEST_HELPERS_HPP
#define LSSID_TEST_HELPERS_HPP

#include "lssid/lssid.hpp"
#include "lssid/rng.hpp"

namespace lssid::test {

inline Mat random_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = scale * rng.gaussian();
    return m;
}

inline EstimatedModel random_model(Rng& rng, int num_modes, int nx, int nu, int ny,
                                   double scale = 1.0) {
    EstimatedModel m = EstimatedModel::zero(num_modes, nx, nu, ny);
    for (int i = 0; i < num_modes; ++i) {
        m.A[i] = random_matrix(rng, nx, nx, scale);
        m.B[i] = random_matrix(rng, nx, nu, scale);
    }
    m.C = random_matrix(rng, ny, nx, scale);
    return m;
}

inline ModeSequence random_modes(Rng& rng, int num_modes, int n) {
    ModeSequence modes(n);
    for (int k = 0; k < n; ++k) modes[k] = rng.uniform_int(1, num_modes);
    return modes;
}

// Small dataset with random contents; timestamps are non-uniform unless
// dt_jitter is zero.
inline SampledDataset random_dataset(Rng& rng, int n, int nu, int ny, double dt = 0.05,
                                     double dt_jitter = 0.02) {
    SampledDataset d;
    d.t = Vec(n);
    d.t[0] = 0.0;
    for (int k = 1; k < n; ++k) d.t[k] = d.t[k - 1] + dt + dt_jitter * rng.uniform();
    d.u = random_matrix(rng, n, nu);
    d.y = random_matrix(rng, n, ny);
    return d;
}

}  // namespace lssid::test

#endif
