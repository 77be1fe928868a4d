#ifndef LSSID_IO_HPP
#define LSSID_IO_HPP

#include <limits>
#include <string>
#include <vector>

#include "lssid/types.hpp"

namespace lssid {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// CSV dataset: header `t,u1..,y1..[,s][,x1..][,y0_1..]`; values with 17
/// significant digits so round-trips are value-exact.
SampledDataset read_dataset(const std::string& path);
void write_dataset(const SampledDataset& dataset, const std::string& path);

/// Flat `key = value` config (# comments). Unknown keys are rejected.
struct ExperimentConfig {
    double alpha = 0.01;
    double tau = 1e-6;
    double pi = 0.1;
    double eps = 1e-9;
    double sigma_x = 0.01;
    int n_max = 1000;
    int restarts = 5;
    int num_modes = 2;  // key: k
    int nx = 2;
    std::uint64_t seed = 1;
    bool literal_switch_sign = false;

    FitConfig make_fit_config() const;
};

ExperimentConfig read_config(const std::string& path);

/// Training metrics attached to a result file. Mode-fit fields are NaN when
/// the dataset carries no ground-truth modes.
struct ResultMetrics {
    double bfr = std::numeric_limits<double>::quiet_NaN();
    double mode_fit_matched = std::numeric_limits<double>::quiet_NaN();
    double mode_fit_literal = std::numeric_limits<double>::quiet_NaN();
    std::vector<int> permutation;  // empty when unavailable
};

/// Structured JSON result document (model matrices row-major with explicit
/// dims, mode sequence, states, cost trace, metrics, config echo, version).
/// Stable key order and float rendering: identical runs give identical bytes.
void write_result(const FitResult& result, const ExperimentConfig& config,
                  const ResultMetrics& metrics, const std::string& path);

struct LoadedResult {
    FitResult result;
    ExperimentConfig config;
    ResultMetrics metrics;
};

LoadedResult read_result(const std::string& path);

}  // namespace lssid

#endif
