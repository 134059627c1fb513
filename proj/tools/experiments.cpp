#include "experiments.hpp"

#include "qmeas/collectives.hpp"
#include "qmeas/epr.hpp"
#include "qmeas/io.hpp"
#include "qmeas/joint_nonideal.hpp"
#include "qmeas/observables.hpp"
#include "qmeas/parallel.hpp"
#include "qmeas/rng.hpp"
#include "qmeas/states.hpp"
#include "qmeas/subquantum.hpp"
#include "qmeas/version.hpp"

#include <json.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace qmeas::cli {

namespace {

using nlohmann::json;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Report {
    std::string text;
    std::string anomaly;  // nonempty => exit kExitAnomaly after writing
};

constexpr std::uint64_t kDefaultSamples = 1000000;
constexpr std::uint64_t kDefaultSeed = 1;

const json& need(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) {
        throw SchemaError(fmt::format("config: missing field '{}'", key));
    }
    return *it;
}

json load_config(const Invocation& inv) {
    json config;
    if (inv.config_path) {
        std::ifstream in(*inv.config_path);
        if (!in) throw IoError(fmt::format("cannot open config '{}'", *inv.config_path));
        std::stringstream buffer;
        buffer << in.rdbuf();
        try {
            config = json::parse(buffer.str());
        } catch (const json::exception& e) {
            throw SchemaError(fmt::format("config: invalid JSON: {}", e.what()));
        }
        if (!config.is_object()) throw SchemaError("config: expected a JSON object");
    } else {
        config = json::object();
    }

    if (config.contains("experiment")) {
        if (config["experiment"].get<std::string>() != inv.experiment) {
            throw SchemaError(fmt::format(
                "config: experiment '{}' does not match command '{}'",
                config["experiment"].get<std::string>(), inv.experiment));
        }
    }
    config["experiment"] = inv.experiment;
    if (!config.contains("inputs")) config["inputs"] = json::object();

    if (inv.seed) config["seed"] = *inv.seed;
    if (!config.contains("seed")) config["seed"] = kDefaultSeed;
    if (inv.samples) config["samples"] = *inv.samples;
    if (!config.contains("samples")) config["samples"] = kDefaultSamples;
    if (inv.output_path) config["output"] = *inv.output_path;
    if (!config.contains("output")) {
        config["output"] = inv.experiment + (inv.experiment == "epr" ? "_report.json"
                                                                     : "_report.csv");
    }

    // subquantum conveniences
    if (inv.model) config["inputs"]["model"] = *inv.model;
    if (inv.angles) {
        double a1 = 0, b1 = 0, a2 = 0, b2 = 0;
        if (std::sscanf(inv.angles->c_str(), "%lf,%lf,%lf,%lf", &a1, &b1, &a2, &b2) != 4) {
            throw SchemaError("--angles expects 'a1,b1,a2,b2' in radians");
        }
        config["inputs"]["angles"] = {{"a1", a1}, {"b1", b1}, {"a2", a2}, {"b2", b2}};
    }
    return config;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(fmt::format("cannot open '{}' for writing", tmp));
        out << content;
        out.flush();
        if (!out) throw IoError(fmt::format("write to '{}' failed", tmp));
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw IoError(fmt::format("rename '{}' -> '{}' failed", tmp, path));
    }
}

// Spin PVM along the x-z plane direction at `angle` from the z axis.
DiscretePVM spin_pvm(double angle, const std::string& axis_name) {
    ComplexMatrix direction(2, 2);
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    direction << Complex(c, 0), Complex(s, 0), Complex(s, 0), Complex(-c, 0);
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    return make_pvm({axis_name + "+", axis_name + "-"},
                    {0.5 * (id + direction), 0.5 * (id - direction)});
}

struct Angles {
    double a1 = 0.0;
    double b1 = std::numbers::pi / 2;
    double a2 = std::numbers::pi / 4;
    double b2 = 3 * std::numbers::pi / 4;
};

Angles parse_angles(const json& inputs) {
    Angles angles;
    if (inputs.contains("angles")) {
        const json& a = inputs["angles"];
        angles.a1 = need(a, "a1").get<double>();
        angles.b1 = need(a, "b1").get<double>();
        angles.a2 = need(a, "a2").get<double>();
        angles.b2 = need(a, "b2").get<double>();
    }
    return angles;
}

std::string table_csv(const CorrelationTable& table, const std::string& bound_check,
                      bool lp_feasible) {
    std::string csv = "setting_pair,E,stderr\n";
    for (const auto& pair : table.pairs) {
        csv += fmt::format("{}x{},{},{}\n", pair.first_label, pair.second_label,
                           format_double(pair.e_value), format_double(pair.e_stderr));
    }
    csv += fmt::format("S,{},\n", format_double(chsh_value(table)));
    csv += fmt::format("S_bound_check,{},\n", bound_check);
    csv += fmt::format("lp_feasible,{},\n", lp_feasible ? "true" : "false");
    return csv;
}

// ---- epr ------------------------------------------------------------------

Report run_epr(const json& inputs) {
    const StateDocument state_doc = parse_state_vector(need(inputs, "state").dump());
    const DiscretePVM first = parse_pvm(need(inputs, "first_observable").dump());
    const DiscretePVM second = parse_pvm(need(inputs, "second_observable").dump());
    const EPRScenario scenario{state_doc.state, first, second};
    if (scenario.dims().total() != state_doc.state.dim()) {
        throw SchemaError("epr: observable dimensions do not match the state");
    }

    const RealMatrix grid = joint_probability(scenario);
    json report;
    {
        json rows = json::array();
        for (Eigen::Index i = 0; i < grid.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index j = 0; j < grid.cols(); ++j) row.push_back(grid(i, j));
            rows.push_back(std::move(row));
        }
        report["joint_grid"] = std::move(rows);
    }

    json first_marginal = json::array();
    for (Eigen::Index i = 0; i < grid.rows(); ++i) first_marginal.push_back(grid.row(i).sum());
    report["first_marginal"] = std::move(first_marginal);

    json conditionals = json::object();
    json prepared = json::object();
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
        if (grid.row(i).sum() <= 1e-12) continue;
        conditionals[std::to_string(i)] = conditional_probability(grid, static_cast<int>(i));
        const DensityOperator rho_2i =
            conditionally_prepared_state(state_doc.state, first, static_cast<int>(i));
        prepared[std::to_string(i)] =
            json::parse(to_json(rho_2i, {second.dim()}));
    }
    report["conditionals"] = std::move(conditionals);
    report["conditionally_prepared"] = std::move(prepared);

    const DensityOperator rho12 = density_from_pure(state_doc.state);
    const Dims dims = scenario.dims();
    const DensityOperator rho1 = reduce(rho12, dims, Subsystem::first);
    const DensityOperator rho2 = reduce(rho12, dims, Subsystem::second);
    report["contextual_state_first"] =
        json::parse(to_json(contextual_state(rho1, first), {dims.first}));
    report["contextual_state_second"] =
        json::parse(to_json(contextual_state(rho2, second), {dims.second}));
    report["two_particle_contextual"] = json::parse(
        to_json(two_particle_contextual_state(state_doc.state, first, second),
                {dims.first, dims.second}));

    return Report{report.dump(2) + "\n", ""};
}

// ---- martens ---------------------------------------------------------------

Report run_martens(const json& inputs) {
    const BivariatePOVM grid = parse_bivariate_povm(need(inputs, "bivariate_povm").dump());
    const DiscretePVM row_ideal = parse_pvm(need(inputs, "row_ideal").dump());
    const DiscretePVM col_ideal = parse_pvm(need(inputs, "col_ideal").dump());
    MartensReport result;
    try {
        result = verify_martens(grid, row_ideal, col_ideal);
    } catch (const std::runtime_error& e) {
        throw SchemaError(fmt::format("martens: {}", e.what()));
    }
    const double margin = result.j_lambda + result.j_mu - result.bound;
    std::string csv = "J_lambda,J_mu,bound,margin\n";
    csv += fmt::format("{},{},{},{}\n", format_double(result.j_lambda),
                       format_double(result.j_mu), format_double(result.bound),
                       format_double(margin));
    std::string anomaly;
    if (!result.satisfied) {
        anomaly = fmt::format(
            "martens inequality violated: J_lambda + J_mu = {} < bound {}",
            result.j_lambda + result.j_mu, result.bound);
    }
    return Report{std::move(csv), std::move(anomaly)};
}

// ---- chsh -------------------------------------------------------------------

Report run_chsh(const json& inputs) {
    const StateDocument state_doc = parse_state_vector(need(inputs, "state").dump());
    DiscretePVM a1, b1, a2, b2;
    if (inputs.contains("settings")) {
        const json& s = inputs["settings"];
        a1 = parse_pvm(need(s, "a1").dump());
        b1 = parse_pvm(need(s, "b1").dump());
        a2 = parse_pvm(need(s, "a2").dump());
        b2 = parse_pvm(need(s, "b2").dump());
    } else {
        const Angles angles = parse_angles(inputs);
        a1 = spin_pvm(angles.a1, "A1");
        b1 = spin_pvm(angles.b1, "B1");
        a2 = spin_pvm(angles.a2, "A2");
        b2 = spin_pvm(angles.b2, "B2");
    }
    const CorrelationTable table =
        quantum_correlation_table(state_doc.state, a1, b1, a2, b2);
    const JointFeasibility lp = joint_distribution_exists(table);
    return Report{table_csv(table, "na", lp.feasible), ""};
}

// ---- subquantum --------------------------------------------------------------

Report run_subquantum(const json& inputs, std::uint64_t samples, std::uint64_t seed) {
    const std::string model_name = need(inputs, "model").get<std::string>();
    const Angles angles = parse_angles(inputs);
    const auto axis = [](double angle) {
        return Eigen::Vector3d(std::sin(angle), 0.0, std::cos(angle));
    };
    const std::map<std::string, Eigen::Vector3d> wing1 = {{"A1", axis(angles.a1)},
                                                          {"B1", axis(angles.b1)}};
    const std::map<std::string, Eigen::Vector3d> wing2 = {{"A2", axis(angles.a2)},
                                                          {"B2", axis(angles.b2)}};
    const SettingLabels settings{"A1", "B1", "A2", "B2"};

    CorrelationTable table;
    bool bell_bounded_model = false;
    if (model_name == "noncontextual_sphere") {
        bell_bounded_model = true;
        table = hv_correlation_table(make_sphere_model(wing1, wing2), settings, samples, seed);
    } else if (model_name == "contextual_reference") {
        table = trajectory_correlation(make_contextual_reference_model(wing1, wing2),
                                       settings, samples, seed);
    } else {
        throw SchemaError(fmt::format(
            "subquantum: unknown model '{}' (expected 'noncontextual_sphere' or "
            "'contextual_reference')",
            model_name));
    }

    double stderr_sq = 0.0;
    double max_stderr = 0.0;
    for (const auto& pair : table.pairs) {
        stderr_sq += pair.e_stderr * pair.e_stderr;
        max_stderr = std::max(max_stderr, pair.e_stderr);
    }
    const double s_value = chsh_value(table);
    const double s_sigma = std::sqrt(stderr_sq);

    std::string bound_check = "na";
    std::string anomaly;
    if (bell_bounded_model) {
        if (s_value <= 2.0 + 5.0 * s_sigma) {
            bound_check = "ok";
        } else {
            bound_check = "violated";
            anomaly = fmt::format(
                "instantaneous-lambda model produced S = {} > 2 + 5*sigma ({})", s_value,
                2.0 + 5.0 * s_sigma);
        }
    }
    // Monte Carlo tables need a noise-aware feasibility margin.
    const double tolerance = 1e-9 + 10.0 * max_stderr;
    const JointFeasibility lp = joint_distribution_exists(table, tolerance);
    return Report{table_csv(table, bound_check, lp.feasible), std::move(anomaly)};
}

// ---- collective ---------------------------------------------------------------

OutcomeSequence mixture_sequence(const json& scenario, std::uint64_t samples,
                                 std::uint64_t seed) {
    const json& preparations = need(scenario, "preparations");
    if (!preparations.is_array() || preparations.empty()) {
        throw SchemaError("collective: 'preparations' must be a nonempty array");
    }
    const DiscretePOVM observable = [&] {
        const json& obs = need(scenario, "observable");
        return as_povm(parse_pvm(obs.dump()));
    }();
    std::vector<double> weights;
    if (scenario.contains("weights")) {
        weights = scenario["weights"].get<std::vector<double>>();
        if (weights.size() != preparations.size()) {
            throw SchemaError("collective: weights/preparations size mismatch");
        }
    } else {
        weights.assign(preparations.size(), 1.0);
    }
    double total_weight = 0.0;
    for (const double w : weights) {
        if (!(w >= 0.0)) throw SchemaError("collective: negative mixture weight");
        total_weight += w;
    }
    if (total_weight <= 0.0) throw SchemaError("collective: zero mixture weight");

    // Per-preparation outcome distributions.
    std::vector<std::vector<double>> outcome_cdfs;
    std::vector<double> label_cdf;
    double acc = 0.0;
    for (std::size_t p = 0; p < preparations.size(); ++p) {
        const StateDocument doc = parse_state_vector(preparations[p].dump());
        const std::vector<double> probs =
            probabilities(density_from_pure(doc.state), observable);
        std::vector<double> cdf(probs.size());
        double c = 0.0;
        for (std::size_t m = 0; m < probs.size(); ++m) {
            c += probs[m];
            cdf[m] = c;
        }
        cdf.back() = 1.0;
        outcome_cdfs.push_back(std::move(cdf));
        acc += weights[p] / total_weight;
        label_cdf.push_back(acc);
    }
    label_cdf.back() = 1.0;

    OutcomeSequence seq;
    seq.values.resize(samples);
    seq.side_channel.emplace(samples);
    const std::size_t chunks = (samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
    run_chunks(chunks, [&](std::size_t c) {
        Xoshiro256 rng(derive_seed(seed, "cli.mixture", c));
        const std::size_t begin = c * kMonteCarloChunk;
        const std::size_t count = std::min(kMonteCarloChunk, samples - begin);
        for (std::size_t t = 0; t < count; ++t) {
            const double u = rng.uniform();
            const auto label = static_cast<std::size_t>(
                std::distance(label_cdf.begin(),
                              std::upper_bound(label_cdf.begin(), label_cdf.end(), u)));
            const double v = rng.uniform();
            const auto& cdf = outcome_cdfs[label];
            const auto outcome = static_cast<int>(std::distance(
                cdf.begin(), std::upper_bound(cdf.begin(), cdf.end(), v)));
            seq.values[begin + t] = outcome;
            (*seq.side_channel)[begin + t] = static_cast<int>(label);
        }
    });
    return seq;
}

Report run_collective(const json& inputs, std::uint64_t samples, std::uint64_t seed) {
    const json& scenario = need(inputs, "scenario");
    const std::string kind = scenario.value("kind", std::string("epr"));

    OutcomeSequence seq;
    if (kind == "epr") {
        const StateDocument state_doc = parse_state_vector(need(scenario, "state").dump());
        const DiscretePVM first = parse_pvm(need(scenario, "first_observable").dump());
        const DiscretePVM second = parse_pvm(need(scenario, "second_observable").dump());
        // analyze the second wing, conditioning on first-wing outcomes
        auto [seq1, seq2] =
            generate_epr_sequences(state_doc.state, first, second, samples, seed);
        seq = std::move(seq2);
    } else if (kind == "mixture") {
        seq = mixture_sequence(scenario, samples, seed);
    } else {
        throw SchemaError(fmt::format("collective: unknown scenario kind '{}'", kind));
    }

    const std::vector<SelectionRule> rules =
        parse_selection_rules(need(inputs, "rules").dump());
    const double alpha = inputs.value("alpha", 0.01);

    HomogeneityReport result;
    try {
        result = homogeneity_test(seq, rules, alpha);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(fmt::format("collective: {}", e.what()));
    }

    std::string csv = "rule,outcome,freq_full,freq_sub,z,verdict\n";
    for (const auto& row : result.rows) {
        const char* verdict = row.degenerate      ? "degenerate"
                              : row.inhomogeneous ? "inhomogeneous"
                                                  : "homogeneous";
        csv += fmt::format("{},{},{},{},{},{}\n", row.rule, row.outcome,
                           format_double(row.freq_full), format_double(row.freq_sub),
                           format_double(row.z), verdict);
    }
    csv += fmt::format("overall,,,,,{}\n",
                       result.inhomogeneous ? "inhomogeneous" : "homogeneous");
    return Report{std::move(csv), ""};
}

}  // namespace

int run(const Invocation& inv) {
    const auto started = std::chrono::steady_clock::now();
    json config;
    Report report;
    try {
        config = load_config(inv);
        const std::uint64_t samples = config["samples"].get<std::uint64_t>();
        const std::uint64_t seed = config["seed"].get<std::uint64_t>();
        const json& inputs = config["inputs"];

        if (inv.experiment == "epr") {
            report = run_epr(inputs);
        } else if (inv.experiment == "martens") {
            report = run_martens(inputs);
        } else if (inv.experiment == "chsh") {
            report = run_chsh(inputs);
        } else if (inv.experiment == "subquantum") {
            report = run_subquantum(inputs, samples, seed);
        } else if (inv.experiment == "collective") {
            report = run_collective(inputs, samples, seed);
        } else {
            throw SchemaError(fmt::format("unknown experiment '{}'", inv.experiment));
        }
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSchema;
    }

    const std::string out_path = config["output"].get<std::string>();
    try {
        write_file_atomic(out_path, report.text);
        const auto elapsed = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - started)
                                 .count();
        json manifest;
        manifest["version"] = qmeas::kVersion;
        manifest["resolved_config"] = config;
        manifest["report_path"] = out_path;
        manifest["wall_time_seconds"] = elapsed;
        write_file_atomic(out_path + ".manifest.json", manifest.dump(2) + "\n");
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }

    if (!report.anomaly.empty()) {
        std::cerr << "anomaly: " << report.anomaly << "\n";
        return kExitAnomaly;
    }
    return kExitOk;
}

}  // namespace qmeas::cli
