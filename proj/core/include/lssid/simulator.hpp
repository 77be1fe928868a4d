#ifndef LSSID_SIMULATOR_HPP
#define LSSID_SIMULATOR_HPP

#include <cstdint>
#include <utility>

#include "lssid/types.hpp"

namespace lssid {

struct SwitchingSpec {
    enum class Kind { Markov, FixedSequence };
    Kind kind = Kind::Markov;
    double pi = 0.1;     // per-step switch probability (Markov)
    int s0 = 1;          // initial mode (Markov)
    ModeSequence fixed;  // explicit sequence (FixedSequence)
};

struct NoiseSpec {
    enum class Kind { StdDev, TargetSnr };
    Kind kind = Kind::StdDev;
    double sigma = 0.0;   // output-noise std (StdDev)
    double snr_db = 0.0;  // target SNR in dB (TargetSnr)
    std::uint64_t seed = 0;
};

/// Markov switching signal: s(t_0) = s0; afterwards the label repeats with
/// probability 1-pi, otherwise jumps uniformly to one of the other K-1 modes.
ModeSequence sample_markov_switching(int num_modes, double pi, int s0, int n, std::uint64_t seed);

/// Integrates the switched ODE with classical RK4, `substeps` sub-steps per
/// sampling interval; mode and input are held over each interval (ZOH).
/// Returns (states at t_k, noise-free outputs at t_k), both row-per-sample.
std::pair<Mat, Mat> simulate(const SwitchedSystem& system, const Mat& u_samples,
                             const ModeSequence& modes, const Vec& timestamps,
                             const Vec& x0, int substeps);

/// Adds i.i.d. zero-mean Gaussian noise per channel. For TargetSnr the std is
/// chosen so that 10*log10(per-channel sample variance of y0 / sigma^2) equals
/// snr_db.
Mat add_output_noise(const Mat& y0, const NoiseSpec& noise);

/// The two-mode benchmark system (second-order SISO submodels).
SwitchedSystem benchmark_system();

/// Standard-Gaussian input, Markov switching from mode 1, forward-Euler
/// stepping at the sampling grid from x0 = 0, Gaussian output noise.
/// Ground-truth modes, states and noise-free outputs are stored in the
/// dataset. Euler stepping (rather than the high-order simulate()) keeps the
/// sampled data inside the discrete-time model class the rectangular-rule
/// architecture identifies.
SampledDataset generate_benchmark_dataset(int n, double dt, double pi, double sigma_eta,
                                          std::uint64_t seed);

}  // namespace lssid

#endif
