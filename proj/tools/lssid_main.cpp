// Command-line driver: dataset generation, switched-model fitting,
// evaluation against a known truth, tau sweeps and Monte-Carlo studies.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lssid/lssid.hpp"

namespace {

using namespace lssid;

struct FitFlags {
    int num_modes = 2;
    int nx = 2;
    double alpha = 0.01;
    double tau = 1e-6;
    double pi = 0.1;
    int restarts = 5;
    int n_max = 1000;
    double eps = 1e-9;
    double sigma_x = 0.01;
    std::uint64_t seed = 1;
    bool literal_switch_sign = false;
    std::string config_path;

    std::vector<std::pair<CLI::Option*, std::function<void(ExperimentConfig&)>>> overrides;

    void add_to(CLI::App* cmd) {
        auto opt = [&](const char* name, auto& field, const char* help,
                       auto ExperimentConfig::* member) {
            CLI::Option* o = cmd->add_option(name, field, help);
            overrides.emplace_back(o, [&field, member](ExperimentConfig& c) { c.*member = field; });
        };
        opt("--k", num_modes, "number of modes", &ExperimentConfig::num_modes);
        opt("--nx", nx, "model state dimension", &ExperimentConfig::nx);
        opt("--alpha", alpha, "state-regularization weight", &ExperimentConfig::alpha);
        opt("--tau", tau, "transition-loss scale", &ExperimentConfig::tau);
        opt("--pi", pi, "Markov switch probability of the mode loss", &ExperimentConfig::pi);
        opt("--restarts", restarts, "multi-start count", &ExperimentConfig::restarts);
        opt("--n-max", n_max, "max BCD iterations", &ExperimentConfig::n_max);
        opt("--eps", eps, "convergence tolerance", &ExperimentConfig::eps);
        opt("--sigma-x", sigma_x, "state-init perturbation std", &ExperimentConfig::sigma_x);
        opt("--seed", seed, "RNG seed", &ExperimentConfig::seed);
        CLI::Option* lit = cmd->add_flag("--literal-switch-sign", literal_switch_sign,
                                         "use +tau log(pi) as the switch cost (rewards switching)");
        overrides.emplace_back(
            lit, [this](ExperimentConfig& c) { c.literal_switch_sign = literal_switch_sign; });
        cmd->add_option("--config", config_path, "read defaults from a key = value file");
    }

    /// Config file (if any) provides defaults; flags given on the command
    /// line win. Flag defaults apply when neither is present.
    ExperimentConfig resolve() const {
        ExperimentConfig config;
        if (!config_path.empty()) {
            config = read_config(config_path);
            for (const auto& [option, apply] : overrides)
                if (option->count() > 0) apply(config);
        } else {
            for (const auto& [option, apply] : overrides) apply(config);
        }
        return config;
    }
};

ResultMetrics compute_metrics(const FitResult& result, const SampledDataset& dataset) {
    ResultMetrics metrics;
    metrics.bfr = bfr(open_loop_outputs(result.model, dataset, result.modes,
                                        result.states.row(0).transpose()),
                      dataset.y);
    if (!dataset.true_modes.empty()) {
        const ModeFitResult matched = mode_fit(result.modes, dataset.true_modes, true);
        const ModeFitResult literal = mode_fit(result.modes, dataset.true_modes, false);
        metrics.mode_fit_matched = matched.percent;
        metrics.mode_fit_literal = literal.percent;
        metrics.permutation = matched.permutation;
    }
    return metrics;
}

void print_tf(std::ostream& os, const TransferFunction& tf) {
    auto poly = [&](const Vec& c, int degree_of_first) {
        std::ostringstream s;
        for (int i = 0; i < c.size(); ++i) {
            const int degree = degree_of_first - i;
            if (i > 0) s << (c[i] < 0 ? " - " : " + ");
            else if (c[i] < 0) s << "-";
            s << std::abs(c[i]);
            if (degree == 1) s << " s";
            else if (degree > 1) s << " s^" << degree;
        }
        return s.str();
    };
    os << "(" << poly(tf.num, static_cast<int>(tf.num.size()) - 1) << ") / ("
       << poly(tf.den, static_cast<int>(tf.den.size()) - 1) << ")";
}

void write_bode_csv(const std::string& path, const EstimatedModel& estimated,
                    const SwitchedSystem* truth, const std::vector<int>& permutation) {
    const int points = 200;
    Vec omega(points);
    for (int i = 0; i < points; ++i)
        omega[i] = std::pow(10.0, -1.0 + 4.0 * i / (points - 1));  // 1e-1 .. 1e3 rad/s

    std::ofstream file(path);
    if (!file) throw IoError("cannot open file for writing: " + path);
    file << "omega,mag_db,phase_deg,mode,which\n";
    char buf[64];
    auto emit = [&](const TransferFunction& tf, int mode, const char* which) {
        const auto [mag, phase] = frequency_response(tf, omega);
        for (int i = 0; i < points; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d,%s\n", omega[i], mag[i],
                          phase[i], mode, which);
            file << buf;
        }
    };
    for (int i = 1; i <= estimated.num_modes; ++i) {
        const int label = (static_cast<int>(permutation.size()) == estimated.num_modes)
                              ? permutation[i - 1]
                              : i;
        emit(ss_to_tf(estimated.A[i - 1], estimated.B[i - 1].col(0), estimated.C.row(0)), label,
             "estimated");
    }
    if (truth)
        for (int i = 1; i <= truth->num_modes; ++i)
            emit(ss_to_tf(truth->A[i - 1], truth->B[i - 1].col(0), truth->C[i - 1].row(0)), i,
                 "true");
}

// Runs `jobs` cell evaluations over `threads` workers; results land in
// pre-allocated slots so output order is independent of scheduling.
void run_parallel(int jobs, int threads, const std::function<void(int)>& work) {
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < jobs; i = next.fetch_add(1)) work(i);
    };
    if (threads <= 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

int cmd_generate(int n, double dt, double pi, double sigma_eta, double snr_db, bool use_snr,
                 std::uint64_t seed, const std::string& out) {
    SampledDataset dataset = generate_benchmark_dataset(n, dt, pi, use_snr ? 0.0 : sigma_eta, seed);
    if (use_snr) {
        NoiseSpec noise;
        noise.kind = NoiseSpec::Kind::TargetSnr;
        noise.snr_db = snr_db;
        noise.seed = derive_seed(seed, 2);
        dataset.y = add_output_noise(dataset.y0, noise);
    }
    write_dataset(dataset, out);
    std::cout << "wrote " << dataset.size() << " samples to " << out << "\n";
    return 0;
}

int cmd_fit(const FitFlags& flags, const std::string& data_path, const std::string& out) {
    const SampledDataset dataset = read_dataset(data_path);
    const ExperimentConfig config = flags.resolve();
    const MultistartResult fit = multistart_fit(dataset, config.make_fit_config());
    const ResultMetrics metrics = compute_metrics(fit.best, dataset);
    write_result(fit.best, config, metrics, out);
    std::cout << "bfr=" << metrics.bfr;
    if (std::isfinite(metrics.mode_fit_matched))
        std::cout << " mode_fit=" << metrics.mode_fit_matched;
    std::cout << " iterations=" << fit.best.iterations << " restarts=" << config.restarts
              << " J=" << fit.best.final_cost.total << "\n";
    return 0;
}

int cmd_evaluate(const std::string& result_path, const std::string& data_path,
                 bool benchmark_truth, const std::string& bode_out) {
    const LoadedResult loaded = read_result(result_path);
    const FitResult& result = loaded.result;
    ResultMetrics metrics = loaded.metrics;
    if (!data_path.empty()) {
        const SampledDataset dataset = read_dataset(data_path);
        metrics = compute_metrics(result, dataset);
    }

    std::cout << "bfr=" << metrics.bfr << "\n";
    if (std::isfinite(metrics.mode_fit_matched))
        std::cout << "mode_fit_matched=" << metrics.mode_fit_matched
                  << " mode_fit_literal=" << metrics.mode_fit_literal << "\n";

    std::vector<int> permutation = metrics.permutation;
    if (static_cast<int>(permutation.size()) != result.model.num_modes) {
        permutation.resize(result.model.num_modes);
        for (int i = 0; i < result.model.num_modes; ++i) permutation[i] = i + 1;
    }
    if (!permutation.empty()) {
        std::cout << "permutation=";
        for (std::size_t i = 0; i < permutation.size(); ++i)
            std::cout << (i ? "," : "") << permutation[i];
        std::cout << "\n";
    }

    for (int i = 1; i <= result.model.num_modes; ++i) {
        std::cout << "G_" << permutation[i - 1] << "(s) = ";
        print_tf(std::cout,
                 ss_to_tf(result.model.A[i - 1], result.model.B[i - 1].col(0),
                          result.model.C.row(0)));
        std::cout << "\n";
    }

    if (benchmark_truth) {
        const SwitchedSystem truth = benchmark_system();
        const auto errors = compare_models(result.model, truth, permutation);
        for (int m = 1; m <= truth.num_modes; ++m) {
            std::cout << "mode " << m << " coefficient errors: num=[";
            for (int c = 0; c < errors[m - 1].num_rel_err.size(); ++c)
                std::cout << (c ? "," : "") << 100.0 * errors[m - 1].num_rel_err[c] << "%";
            std::cout << "] den=[";
            for (int c = 0; c < errors[m - 1].den_rel_err.size(); ++c)
                std::cout << (c ? "," : "") << 100.0 * errors[m - 1].den_rel_err[c] << "%";
            std::cout << "] max=" << 100.0 * errors[m - 1].max_rel_err << "%\n";
        }
        write_bode_csv(bode_out, result.model, &truth, permutation);
    } else {
        write_bode_csv(bode_out, result.model, nullptr, permutation);
    }
    std::cout << "bode data written to " << bode_out << "\n";
    return 0;
}

int cmd_sweep_tau(FitFlags flags, const std::vector<double>& tau_grid,
                  const std::vector<double>& sigma_grid, int n, double dt, double data_pi,
                  int threads, const std::string& out) {
    struct Cell {
        double tau, sigma;
        double mode_fit = 0, bfr_value = 0;
        int switches = 0;
    };
    std::vector<Cell> cells;
    for (double sigma : sigma_grid)
        for (double tau : tau_grid) cells.push_back({tau, sigma});

    // one dataset per noise level, shared across the tau column
    std::vector<SampledDataset> datasets;
    for (std::size_t s = 0; s < sigma_grid.size(); ++s)
        datasets.push_back(
            generate_benchmark_dataset(n, dt, data_pi, sigma_grid[s], derive_seed(flags.seed, s)));

    run_parallel(static_cast<int>(cells.size()), threads, [&](int i) {
        Cell& cell = cells[i];
        const std::size_t sigma_index = static_cast<std::size_t>(i) / tau_grid.size();
        ExperimentConfig config = flags.resolve();
        config.tau = cell.tau;
        const MultistartResult fit =
            multistart_fit(datasets[sigma_index], config.make_fit_config());
        const ResultMetrics metrics = compute_metrics(fit.best, datasets[sigma_index]);
        cell.mode_fit = metrics.mode_fit_matched;
        cell.bfr_value = metrics.bfr;
        for (std::size_t k = 1; k < fit.best.modes.size(); ++k)
            if (fit.best.modes[k] != fit.best.modes[k - 1]) ++cell.switches;
    });

    std::ofstream file(out);
    if (!file) throw IoError("cannot open file for writing: " + out);
    file << "tau,sigma_eta,mode_fit,bfr,switches\n";
    char buf[128];
    for (const Cell& cell : cells) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%d\n", cell.tau, cell.sigma,
                      cell.mode_fit, cell.bfr_value, cell.switches);
        file << buf;
    }
    std::cout << "wrote " << cells.size() << " sweep cells to " << out << "\n";
    return 0;
}

int cmd_monte_carlo(const FitFlags& flags, int runs, int n, double dt, double data_pi,
                    double sigma_eta, int threads, const std::string& out) {
    struct Row {
        double bfr_value = 0, mode_fit = 0;
        int iterations = 0;
    };
    std::vector<Row> rows(runs);
    run_parallel(runs, threads, [&](int r) {
        const SampledDataset dataset = generate_benchmark_dataset(
            n, dt, data_pi, sigma_eta, derive_seed(flags.seed, 1000 + static_cast<std::uint64_t>(r)));
        ExperimentConfig config = flags.resolve();
        config.seed = derive_seed(flags.seed, 2000 + static_cast<std::uint64_t>(r));
        const MultistartResult fit = multistart_fit(dataset, config.make_fit_config());
        const ResultMetrics metrics = compute_metrics(fit.best, dataset);
        rows[r] = {metrics.bfr, metrics.mode_fit_matched, fit.best.iterations};
    });

    std::ofstream file(out);
    if (!file) throw IoError("cannot open file for writing: " + out);
    file << "run,bfr,mode_fit,iterations\n";
    char buf[128];
    for (int r = 0; r < runs; ++r) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%d\n", r, rows[r].bfr_value,
                      rows[r].mode_fit, rows[r].iterations);
        file << buf;
    }

    auto summary = [&](auto getter) {
        std::vector<double> v(runs);
        for (int r = 0; r < runs; ++r) v[r] = getter(rows[r]);
        std::sort(v.begin(), v.end());
        const double median =
            runs % 2 ? v[runs / 2] : 0.5 * (v[runs / 2 - 1] + v[runs / 2]);
        std::ostringstream s;
        s << "min=" << v.front() << " median=" << median << " max=" << v.back();
        return s.str();
    };
    std::cout << "bfr: " << summary([](const Row& r) { return r.bfr_value; }) << "\n";
    std::cout << "mode_fit: " << summary([](const Row& r) { return r.mode_fit; }) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"continuous-time linear switched state-space identification"};
    app.require_subcommand(1);

    // generate
    auto* generate = app.add_subcommand("generate", "generate a benchmark dataset CSV");
    int gen_n = 400;
    double gen_dt = 0.01, gen_pi = 0.1, gen_sigma = 0.025, gen_snr = 30.0;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "dataset.csv";
    generate->add_option("--n", gen_n, "number of samples");
    generate->add_option("--dt", gen_dt, "sampling time [s]");
    generate->add_option("--pi", gen_pi, "Markov switch probability");
    auto* sigma_opt = generate->add_option("--sigma-eta", gen_sigma, "output-noise std");
    auto* snr_opt = generate->add_option("--snr-db", gen_snr, "target SNR in dB");
    sigma_opt->excludes(snr_opt);
    generate->add_option("--seed", gen_seed, "RNG seed");
    generate->add_option("--out", gen_out, "output CSV path");

    // fit
    auto* fit = app.add_subcommand("fit", "identify a switched model from a dataset");
    FitFlags fit_flags;
    std::string fit_data, fit_out = "result.json";
    fit->add_option("--data", fit_data, "dataset CSV path")->required();
    fit->add_option("--out", fit_out, "result JSON path");
    fit_flags.add_to(fit);

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "report metrics and Bode data for a result");
    std::string eval_result, eval_data, eval_bode = "bode.csv";
    bool eval_truth = false;
    evaluate->add_option("--result", eval_result, "result JSON path")->required();
    evaluate->add_option("--data", eval_data, "dataset CSV for metric recomputation");
    evaluate->add_flag("--benchmark-truth", eval_truth,
                       "compare against the built-in benchmark system");
    evaluate->add_option("--bode-out", eval_bode, "Bode CSV path");

    // sweep-tau
    auto* sweep = app.add_subcommand("sweep-tau", "mode fit vs tau for several noise levels");
    FitFlags sweep_flags;
    std::vector<double> tau_grid = {1e-8, 1e-7, 3e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
    std::vector<double> sigma_grid = {0.02, 0.03, 0.05, 0.08};
    int sweep_n = 400, sweep_threads = static_cast<int>(std::thread::hardware_concurrency());
    double sweep_dt = 0.01, sweep_data_pi = 0.1;
    std::string sweep_out = "sweep.csv";
    sweep->add_option("--tau-grid", tau_grid, "tau values");
    sweep->add_option("--sigma-grid", sigma_grid, "noise standard deviations");
    sweep->add_option("--n", sweep_n, "samples per dataset");
    sweep->add_option("--dt", sweep_dt, "sampling time [s]");
    sweep->add_option("--data-pi", sweep_data_pi, "true switch probability of the data");
    sweep->add_option("--threads", sweep_threads, "worker threads");
    sweep->add_option("--out", sweep_out, "output CSV path");
    sweep_flags.add_to(sweep);

    // monte-carlo
    auto* mc = app.add_subcommand("monte-carlo", "repeated fits on fresh data realizations");
    FitFlags mc_flags;
    mc_flags.tau = 3e-7;
    int mc_runs = 10, mc_n = 400, mc_threads = static_cast<int>(std::thread::hardware_concurrency());
    double mc_dt = 0.01, mc_data_pi = 0.1, mc_sigma = 0.025;
    std::string mc_out = "monte_carlo.csv";
    mc->add_option("--runs", mc_runs, "number of Monte-Carlo runs");
    mc->add_option("--n", mc_n, "samples per dataset");
    mc->add_option("--dt", mc_dt, "sampling time [s]");
    mc->add_option("--data-pi", mc_data_pi, "true switch probability of the data");
    mc->add_option("--sigma-eta", mc_sigma, "output-noise std");
    mc->add_option("--threads", mc_threads, "worker threads");
    mc->add_option("--out", mc_out, "output CSV path");
    mc_flags.add_to(mc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (generate->parsed())
            return cmd_generate(gen_n, gen_dt, gen_pi, gen_sigma, gen_snr,
                                snr_opt->count() > 0, gen_seed, gen_out);
        if (fit->parsed()) return cmd_fit(fit_flags, fit_data, fit_out);
        if (evaluate->parsed()) return cmd_evaluate(eval_result, eval_data, eval_truth, eval_bode);
        if (sweep->parsed())
            return cmd_sweep_tau(sweep_flags, tau_grid, sigma_grid, sweep_n, sweep_dt,
                                 sweep_data_pi, sweep_threads, sweep_out);
        if (mc->parsed())
            return cmd_monte_carlo(mc_flags, mc_runs, mc_n, mc_dt, mc_data_pi, mc_sigma,
                                   mc_threads, mc_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
