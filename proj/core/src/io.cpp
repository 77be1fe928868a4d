#include "lssid/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "lssid/dp.hpp"
#include "lssid/version.hpp"

namespace lssid {

namespace {

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_number(const std::string& cell, int row, int col) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        std::ostringstream msg;
        msg << "non-numeric cell at row " << row << ", column " << col + 1 << ": '" << cell << "'";
        throw IoError(msg.str());
    }
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

// counts a run of columns named <prefix>1..<prefix>n at position `idx`
int count_prefixed(const std::vector<std::string>& header, std::size_t& idx,
                   const std::string& prefix) {
    int count = 0;
    while (idx < header.size()) {
        std::ostringstream expected;
        expected << prefix << (count + 1);
        if (header[idx] != expected.str()) break;
        ++count;
        ++idx;
    }
    return count;
}

}  // namespace

SampledDataset read_dataset(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open dataset file: " + path);

    std::string line;
    if (!std::getline(file, line)) throw IoError("empty dataset file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_csv_line(line);

    std::size_t idx = 0;
    if (header.empty() || header[0] != "t")
        throw IoError("malformed header: first column must be 't'");
    ++idx;
    const int nu = count_prefixed(header, idx, "u");
    const int ny = count_prefixed(header, idx, "y");
    if (nu == 0 || ny == 0)
        throw IoError("malformed header: expected u1.. and y1.. columns after 't'");
    bool has_modes = false;
    if (idx < header.size() && header[idx] == "s") {
        has_modes = true;
        ++idx;
    }
    const int nx = count_prefixed(header, idx, "x");
    const int ny0 = count_prefixed(header, idx, "y0_");
    if (idx != header.size())
        throw IoError("malformed header: unrecognized column '" + header[idx] + "'");
    if (ny0 != 0 && ny0 != ny)
        throw IoError("malformed header: y0_ column count must match y column count");
    const std::size_t columns = header.size();

    std::vector<std::vector<double>> rows;
    std::vector<int> modes;
    int row_number = 1;
    while (std::getline(file, line)) {
        ++row_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != columns) {
            std::ostringstream msg;
            msg << "ragged row " << row_number << ": expected " << columns << " cells, got "
                << cells.size();
            throw IoError(msg.str());
        }
        std::vector<double> values(columns);
        for (std::size_t c = 0; c < columns; ++c)
            values[c] = parse_number(cells[c], row_number, static_cast<int>(c));
        rows.push_back(std::move(values));
    }

    const int n = static_cast<int>(rows.size());
    SampledDataset d;
    d.t = Vec(n);
    d.u = Mat(n, nu);
    d.y = Mat(n, ny);
    if (nx > 0) d.true_states = Mat(n, nx);
    if (ny0 > 0) d.y0 = Mat(n, ny0);
    if (has_modes) d.true_modes.resize(n);
    for (int k = 0; k < n; ++k) {
        std::size_t c = 0;
        d.t[k] = rows[k][c++];
        for (int i = 0; i < nu; ++i) d.u(k, i) = rows[k][c++];
        for (int i = 0; i < ny; ++i) d.y(k, i) = rows[k][c++];
        if (has_modes) d.true_modes[k] = static_cast<int>(rows[k][c++]);
        for (int i = 0; i < nx; ++i) d.true_states(k, i) = rows[k][c++];
        for (int i = 0; i < ny0; ++i) d.y0(k, i) = rows[k][c++];
    }
    validate(d);
    return d;
}

void write_dataset(const SampledDataset& dataset, const std::string& path) {
    validate(dataset);
    std::ofstream file(path);
    if (!file) throw IoError("cannot open file for writing: " + path);

    file << "t";
    for (int i = 1; i <= dataset.nu(); ++i) file << ",u" << i;
    for (int i = 1; i <= dataset.ny(); ++i) file << ",y" << i;
    if (!dataset.true_modes.empty()) file << ",s";
    for (int i = 1; i <= static_cast<int>(dataset.true_states.cols()); ++i) file << ",x" << i;
    if (dataset.y0.size() != 0)
        for (int i = 1; i <= dataset.ny(); ++i) file << ",y0_" << i;
    file << "\n";

    for (int k = 0; k < dataset.size(); ++k) {
        file << format_value(dataset.t[k]);
        for (int i = 0; i < dataset.nu(); ++i) file << "," << format_value(dataset.u(k, i));
        for (int i = 0; i < dataset.ny(); ++i) file << "," << format_value(dataset.y(k, i));
        if (!dataset.true_modes.empty()) file << "," << dataset.true_modes[k];
        for (int i = 0; i < dataset.true_states.cols(); ++i)
            file << "," << format_value(dataset.true_states(k, i));
        if (dataset.y0.size() != 0)
            for (int i = 0; i < dataset.ny(); ++i) file << "," << format_value(dataset.y0(k, i));
        file << "\n";
    }
    if (!file) throw IoError("write failed: " + path);
}

FitConfig ExperimentConfig::make_fit_config() const {
    FitConfig config;
    config.alpha = alpha;
    config.mode_loss = markov_mode_loss(num_modes, pi, tau, literal_switch_sign);
    config.eps = eps;
    config.n_max = n_max;
    config.restarts = restarts;
    config.sigma_x = sigma_x;
    config.seed = seed;
    config.num_modes = num_modes;
    config.nx = nx;
    return config;
}

ExperimentConfig read_config(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open config file: " + path);

    ExperimentConfig config;
    std::string line;
    int line_number = 0;
    while (std::getline(file, line)) {
        ++line_number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto not_space = [](unsigned char c) { return !std::isspace(c); };
        line.erase(line.begin(), std::find_if(line.begin(), line.end(), not_space));
        line.erase(std::find_if(line.rbegin(), line.rend(), not_space).base(), line.end());
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw IoError("config line " + std::to_string(line_number) + ": expected key = value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        key.erase(std::find_if(key.rbegin(), key.rend(), not_space).base(), key.end());
        value.erase(value.begin(), std::find_if(value.begin(), value.end(), not_space));

        auto as_double = [&](const std::string& v) { return parse_number(v, line_number, 0); };
        auto as_int = [&](const std::string& v) {
            const double d = as_double(v);
            const int i = static_cast<int>(d);
            if (static_cast<double>(i) != d)
                throw IoError("config key '" + key + "': expected an integer, got '" + v + "'");
            return i;
        };

        if (key == "alpha") config.alpha = as_double(value);
        else if (key == "tau") config.tau = as_double(value);
        else if (key == "pi") config.pi = as_double(value);
        else if (key == "eps") config.eps = as_double(value);
        else if (key == "sigma_x") config.sigma_x = as_double(value);
        else if (key == "n_max") config.n_max = as_int(value);
        else if (key == "restarts") config.restarts = as_int(value);
        else if (key == "k") config.num_modes = as_int(value);
        else if (key == "nx") config.nx = as_int(value);
        else if (key == "seed") config.seed = static_cast<std::uint64_t>(as_double(value));
        else if (key == "literal_switch_sign") config.literal_switch_sign = as_int(value) != 0;
        else throw IoError("config line " + std::to_string(line_number) + ": unknown key '" + key + "'");
    }
    return config;
}

namespace {

using json = nlohmann::ordered_json;

json matrix_to_json(const Mat& m) {
    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    std::vector<double> data;
    data.reserve(m.size());
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    j["data"] = data;  // row-major
    return j;
}

Mat matrix_from_json(const json& j) {
    const int rows = j.at("rows").get<int>();
    const int cols = j.at("cols").get<int>();
    const std::vector<double> data = j.at("data").get<std::vector<double>>();
    if (static_cast<int>(data.size()) != rows * cols)
        throw IoError("matrix payload size does not match dims");
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = data[r * cols + c];
    return m;
}

}  // namespace

void write_result(const FitResult& result, const ExperimentConfig& config,
                  const ResultMetrics& metrics, const std::string& path) {
    json j;
    j["library_version"] = kVersion;
    j["config"] = {{"alpha", config.alpha}, {"tau", config.tau},     {"pi", config.pi},
                   {"eps", config.eps},     {"sigma_x", config.sigma_x}, {"n_max", config.n_max},
                   {"restarts", config.restarts}, {"k", config.num_modes}, {"nx", config.nx},
                   {"seed", config.seed},   {"literal_switch_sign", config.literal_switch_sign}};
    json model;
    model["k"] = result.model.num_modes;
    model["nx"] = result.model.nx;
    model["nu"] = result.model.nu;
    model["ny"] = result.model.ny();
    model["a"] = json::array();
    model["b"] = json::array();
    for (int i = 0; i < result.model.num_modes; ++i) {
        model["a"].push_back(matrix_to_json(result.model.A[i]));
        model["b"].push_back(matrix_to_json(result.model.B[i]));
    }
    model["c"] = matrix_to_json(result.model.C);
    j["model"] = std::move(model);
    j["modes"] = result.modes;
    j["states"] = matrix_to_json(result.states);
    j["cost_trace"] = result.cost_trace;
    j["step_costs"] = result.step_costs;
    j["final_cost"] = {{"total", result.final_cost.total},
                       {"output_fit", result.final_cost.output_fit},
                       {"state_reg", result.final_cost.state_reg},
                       {"mode_loss", result.final_cost.mode_loss}};
    auto number_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    j["metrics"] = {{"bfr", number_or_null(metrics.bfr)},
                    {"mode_fit_matched", number_or_null(metrics.mode_fit_matched)},
                    {"mode_fit_literal", number_or_null(metrics.mode_fit_literal)},
                    {"permutation", metrics.permutation}};
    j["iterations"] = result.iterations;
    j["termination"] =
        result.termination == Termination::Tolerance ? "tolerance" : "max-iterations";
    j["rank_deficient"] = result.rank_deficient;

    std::ofstream file(path);
    if (!file) throw IoError("cannot open file for writing: " + path);
    file << j.dump(2) << "\n";
    if (!file) throw IoError("write failed: " + path);
}

LoadedResult read_result(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open result file: " + path);
    json j;
    try {
        file >> j;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed result JSON: ") + e.what());
    }

    LoadedResult out;
    const json& c = j.at("config");
    out.config.alpha = c.at("alpha").get<double>();
    out.config.tau = c.at("tau").get<double>();
    out.config.pi = c.at("pi").get<double>();
    out.config.eps = c.at("eps").get<double>();
    out.config.sigma_x = c.at("sigma_x").get<double>();
    out.config.n_max = c.at("n_max").get<int>();
    out.config.restarts = c.at("restarts").get<int>();
    out.config.num_modes = c.at("k").get<int>();
    out.config.nx = c.at("nx").get<int>();
    out.config.seed = c.at("seed").get<std::uint64_t>();
    out.config.literal_switch_sign = c.at("literal_switch_sign").get<bool>();

    const json& m = j.at("model");
    out.result.model.num_modes = m.at("k").get<int>();
    out.result.model.nx = m.at("nx").get<int>();
    out.result.model.nu = m.at("nu").get<int>();
    for (const json& a : m.at("a")) out.result.model.A.push_back(matrix_from_json(a));
    for (const json& b : m.at("b")) out.result.model.B.push_back(matrix_from_json(b));
    out.result.model.C = matrix_from_json(m.at("c"));

    out.result.modes = j.at("modes").get<ModeSequence>();
    out.result.states = matrix_from_json(j.at("states"));
    out.result.cost_trace = j.at("cost_trace").get<std::vector<double>>();
    out.result.step_costs = j.at("step_costs").get<std::vector<std::array<double, 3>>>();
    const json& fc = j.at("final_cost");
    out.result.final_cost.total = fc.at("total").get<double>();
    out.result.final_cost.output_fit = fc.at("output_fit").get<double>();
    out.result.final_cost.state_reg = fc.at("state_reg").get<double>();
    out.result.final_cost.mode_loss = fc.at("mode_loss").get<double>();
    out.result.iterations = j.at("iterations").get<int>();
    out.result.termination = j.at("termination").get<std::string>() == "tolerance"
                                 ? Termination::Tolerance
                                 : Termination::MaxIterations;
    out.result.rank_deficient = j.at("rank_deficient").get<bool>();
    const json& mx = j.at("metrics");
    auto number = [](const json& v) {
        return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    out.metrics.bfr = number(mx.at("bfr"));
    out.metrics.mode_fit_matched = number(mx.at("mode_fit_matched"));
    out.metrics.mode_fit_literal = number(mx.at("mode_fit_literal"));
    out.metrics.permutation = mx.at("permutation").get<std::vector<int>>();
    return out;
}

}  // namespace lssid
