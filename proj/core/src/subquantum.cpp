#include "qmeas/subquantum.hpp"

#include "qmeas/epr.hpp"
#include "qmeas/parallel.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace qmeas {

namespace {

const ResponseFunction& find_response(const std::map<std::string, ResponseFunction>& responses,
                                      const std::string& label) {
    const auto it = responses.find(label);
    if (it == responses.end()) {
        throw std::invalid_argument(fmt::format("unknown observable label '{}'", label));
    }
    return it->second;
}

std::vector<double> eval_response(const ResponseFunction& f, const HiddenState& state,
                                  const std::string& label) {
    std::vector<double> p = f(state);
    double sum = 0.0;
    for (const double v : p) {
        if (!std::isfinite(v) || v < -1e-12 || v > 1.0 + 1e-12) {
            throw std::runtime_error(fmt::format(
                "response for '{}' returned probability {} outside [0,1]", label, v));
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::runtime_error(fmt::format(
            "response for '{}' does not normalize (sum {})", label, sum));
    }
    return p;
}

std::vector<double> eval_dichotomic(const ResponseFunction& f, const HiddenState& state,
                                    const std::string& label) {
    std::vector<double> p = eval_response(f, state, label);
    if (p.size() != 2) {
        throw std::invalid_argument(fmt::format(
            "correlation tables need dichotomic responses; '{}' has {} outcomes", label,
            p.size()));
    }
    return p;
}

struct TableAccumulator {
    std::array<double, 16> quad{};
    std::array<double, 4> e_sum{};
    std::array<double, 4> e_sq_sum{};
    double count = 0.0;

    void add(const std::vector<double>& pa1, const std::vector<double>& pb1,
             const std::vector<double>& pa2, const std::vector<double>& pb2,
             double weight) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l)
                        quad[static_cast<std::size_t>(i * 8 + j * 4 + k * 2 + l)] +=
                            weight * pa1[static_cast<std::size_t>(i)] *
                            pb1[static_cast<std::size_t>(j)] *
                            pa2[static_cast<std::size_t>(k)] *
                            pb2[static_cast<std::size_t>(l)];
        const double sa1 = pa1[0] - pa1[1];
        const double sb1 = pb1[0] - pb1[1];
        const double sa2 = pa2[0] - pa2[1];
        const double sb2 = pb2[0] - pb2[1];
        const double e[4] = {sa1 * sa2, sa1 * sb2, sb1 * sa2, sb1 * sb2};
        for (int p = 0; p < 4; ++p) {
            e_sum[static_cast<std::size_t>(p)] += weight * e[p];
            e_sq_sum[static_cast<std::size_t>(p)] += weight * e[p] * e[p];
        }
        count += weight;
    }

    void merge(const TableAccumulator& other) {
        for (std::size_t i = 0; i < quad.size(); ++i) quad[i] += other.quad[i];
        for (std::size_t p = 0; p < 4; ++p) {
            e_sum[p] += other.e_sum[p];
            e_sq_sum[p] += other.e_sq_sum[p];
        }
        count += other.count;
    }
};

// Marginalizes the quadrivariate sums onto the four pair grids.
CorrelationTable table_from_accumulator(const TableAccumulator& acc,
                                        const SettingLabels& settings, bool exact,
                                        bool keep_quadrivariate) {
    const double n = acc.count;
    CorrelationTable table;
    const std::array<std::pair<std::string, std::string>, 4> names = {
        std::pair{settings.a1, settings.a2}, std::pair{settings.a1, settings.b2},
        std::pair{settings.b1, settings.a2}, std::pair{settings.b1, settings.b2}};
    for (int p = 0; p < 4; ++p) {
        auto& grid = table.pairs[static_cast<std::size_t>(p)];
        grid.first_label = names[static_cast<std::size_t>(p)].first;
        grid.second_label = names[static_cast<std::size_t>(p)].second;
        grid.probabilities.setZero();
    }
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                for (int l = 0; l < 2; ++l) {
                    const double v =
                        acc.quad[static_cast<std::size_t>(i * 8 + j * 4 + k * 2 + l)] / n;
                    table.pairs[0].probabilities(i, k) += v;
                    table.pairs[1].probabilities(i, l) += v;
                    table.pairs[2].probabilities(j, k) += v;
                    table.pairs[3].probabilities(j, l) += v;
                }
            }
        }
    }
    for (int p = 0; p < 4; ++p) {
        auto& grid = table.pairs[static_cast<std::size_t>(p)];
        const double mean = acc.e_sum[static_cast<std::size_t>(p)] / n;
        grid.e_value = mean;
        if (exact) {
            grid.e_stderr = 0.0;
        } else {
            const double var =
                std::max(0.0, acc.e_sq_sum[static_cast<std::size_t>(p)] / n - mean * mean);
            grid.e_stderr = std::sqrt(var / n);
        }
    }
    if (keep_quadrivariate) {
        std::array<double, 16> quad{};
        for (std::size_t q = 0; q < 16; ++q) quad[q] = acc.quad[q] / n;
        table.quadrivariate = quad;
    }
    return table;
}

std::vector<WeightedState> normalized_support(const HVModel& model) {
    if (model.finite_support.empty()) {
        throw std::invalid_argument("model has no finite support; use the Monte Carlo path");
    }
    double total = 0.0;
    for (const auto& ws : model.finite_support) {
        if (!(ws.weight >= 0.0)) {
            throw std::invalid_argument("finite support weights must be nonnegative");
        }
        total += ws.weight;
    }
    if (total <= 0.0) throw std::invalid_argument("finite support weights sum to zero");
    std::vector<WeightedState> out = model.finite_support;
    for (auto& ws : out) ws.weight /= total;
    return out;
}

double grid_e(const Eigen::Matrix2d& p) {
    return p(0, 0) - p(0, 1) - p(1, 0) + p(1, 1);
}

}  // namespace

std::string context_key(const std::string& wing1_label, const std::string& wing2_label) {
    return wing1_label + "|" + wing2_label;
}

McDistribution hv_single_probability(const HVModel& model, const std::string& label,
                                     std::size_t n_samples, std::uint64_t seed) {
    if (n_samples == 0) throw std::invalid_argument("hv_single_probability: n must be >= 1");
    const ResponseFunction& response = find_response(model.responses, label);
    if (!model.sampler) throw std::invalid_argument("hv_single_probability: model has no sampler");

    const std::size_t chunks = (n_samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
    struct Accum {
        std::vector<double> sum, sq_sum;
    };
    std::vector<Accum> slots(chunks);
    const std::string stream = "subquantum.single." + label;
    run_chunks(chunks, [&](std::size_t c) {
        Xoshiro256 rng(derive_seed(seed, stream, c));
        const std::size_t begin = c * kMonteCarloChunk;
        const std::size_t count = std::min(kMonteCarloChunk, n_samples - begin);
        Accum acc;
        for (std::size_t t = 0; t < count; ++t) {
            const HiddenState state = model.sampler(rng);
            const std::vector<double> p = eval_response(response, state, label);
            if (acc.sum.empty()) {
                acc.sum.assign(p.size(), 0.0);
                acc.sq_sum.assign(p.size(), 0.0);
            }
            for (std::size_t i = 0; i < p.size(); ++i) {
                acc.sum[i] += p[i];
                acc.sq_sum[i] += p[i] * p[i];
            }
        }
        slots[c] = std::move(acc);
    });

    std::vector<double> sum, sq_sum;
    for (const auto& acc : slots) {
        if (acc.sum.empty()) continue;
        if (sum.empty()) {
            sum.assign(acc.sum.size(), 0.0);
            sq_sum.assign(acc.sum.size(), 0.0);
        }
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += acc.sum[i];
            sq_sum[i] += acc.sq_sum[i];
        }
    }

    const double n = static_cast<double>(n_samples);
    McDistribution out;
    out.probabilities.resize(sum.size());
    out.std_errors.resize(sum.size());
    double total = 0.0;
    for (std::size_t i = 0; i < sum.size(); ++i) {
        out.probabilities[i] = sum[i] / n;
        total += out.probabilities[i];
        const double var = std::max(0.0, sq_sum[i] / n - (sum[i] / n) * (sum[i] / n));
        out.std_errors[i] = std::sqrt(var / n);
    }
    for (auto& p : out.probabilities) p /= total;
    return out;
}

CorrelationTable hv_correlation_table(const HVModel& model, const SettingLabels& settings,
                                      std::size_t n_samples, std::uint64_t seed) {
    if (n_samples == 0) throw std::invalid_argument("hv_correlation_table: n must be >= 1");
    if (!model.sampler) throw std::invalid_argument("hv_correlation_table: model has no sampler");
    const ResponseFunction& ra1 = find_response(model.responses, settings.a1);
    const ResponseFunction& rb1 = find_response(model.responses, settings.b1);
    const ResponseFunction& ra2 = find_response(model.responses, settings.a2);
    const ResponseFunction& rb2 = find_response(model.responses, settings.b2);

    const std::size_t chunks = (n_samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
    std::vector<TableAccumulator> slots(chunks);
    run_chunks(chunks, [&](std::size_t c) {
        Xoshiro256 rng(derive_seed(seed, "subquantum.hv_table", c));
        const std::size_t begin = c * kMonteCarloChunk;
        const std::size_t count = std::min(kMonteCarloChunk, n_samples - begin);
        TableAccumulator acc;
        for (std::size_t t = 0; t < count; ++t) {
            const HiddenState state = model.sampler(rng);
            acc.add(eval_dichotomic(ra1, state, settings.a1),
                    eval_dichotomic(rb1, state, settings.b1),
                    eval_dichotomic(ra2, state, settings.a2),
                    eval_dichotomic(rb2, state, settings.b2), 1.0);
        }
        slots[c] = acc;
    });
    TableAccumulator total;
    for (const auto& acc : slots) total.merge(acc);
    return table_from_accumulator(total, settings, /*exact=*/false,
                                  /*keep_quadrivariate=*/true);
}

CorrelationTable hv_correlation_table_exact(const HVModel& model,
                                            const SettingLabels& settings) {
    const ResponseFunction& ra1 = find_response(model.responses, settings.a1);
    const ResponseFunction& rb1 = find_response(model.responses, settings.b1);
    const ResponseFunction& ra2 = find_response(model.responses, settings.a2);
    const ResponseFunction& rb2 = find_response(model.responses, settings.b2);
    TableAccumulator acc;
    for (const auto& ws : normalized_support(model)) {
        acc.add(eval_dichotomic(ra1, ws.state, settings.a1),
                eval_dichotomic(rb1, ws.state, settings.b1),
                eval_dichotomic(ra2, ws.state, settings.a2),
                eval_dichotomic(rb2, ws.state, settings.b2), ws.weight);
    }
    return table_from_accumulator(acc, settings, /*exact=*/true,
                                  /*keep_quadrivariate=*/true);
}

CorrelationTable trajectory_correlation(const TrajectoryModel& model,
                                        const SettingLabels& settings,
                                        std::size_t n_samples, std::uint64_t seed) {
    if (n_samples == 0) throw std::invalid_argument("trajectory_correlation: n must be >= 1");
    const std::array<std::pair<std::string, std::string>, 4> pair_labels = {
        std::pair{settings.a1, settings.a2}, std::pair{settings.a1, settings.b2},
        std::pair{settings.b1, settings.a2}, std::pair{settings.b1, settings.b2}};

    CorrelationTable table;
    for (int p = 0; p < 4; ++p) {
        const auto& [w1, w2] = pair_labels[static_cast<std::size_t>(p)];
        const auto ctx = model.context_samplers.find(context_key(w1, w2));
        if (ctx == model.context_samplers.end()) {
            throw std::invalid_argument(fmt::format(
                "trajectory_correlation: missing context sampler '{}'", context_key(w1, w2)));
        }
        const ResponseFunction& r1 = find_response(model.responses, w1);
        const ResponseFunction& r2 = find_response(model.responses, w2);

        const std::size_t chunks = (n_samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
        struct PairAccum {
            Eigen::Matrix2d grid = Eigen::Matrix2d::Zero();
            double e_sum = 0.0, e_sq_sum = 0.0;
        };
        std::vector<PairAccum> slots(chunks);
        const std::string stream = fmt::format("subquantum.trajectory.{}", p);
        run_chunks(chunks, [&](std::size_t c) {
            Xoshiro256 rng(derive_seed(seed, stream, c));
            const std::size_t begin = c * kMonteCarloChunk;
            const std::size_t count = std::min(kMonteCarloChunk, n_samples - begin);
            PairAccum acc;
            for (std::size_t t = 0; t < count; ++t) {
                const HiddenState state = ctx->second(rng);
                const std::vector<double> p1 = eval_dichotomic(r1, state, w1);
                const std::vector<double> p2 = eval_dichotomic(r2, state, w2);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j)
                        acc.grid(i, j) += p1[static_cast<std::size_t>(i)] *
                                          p2[static_cast<std::size_t>(j)];
                const double e = (p1[0] - p1[1]) * (p2[0] - p2[1]);
                acc.e_sum += e;
                acc.e_sq_sum += e * e;
            }
            slots[c] = acc;
        });

        PairAccum total;
        for (const auto& acc : slots) {
            total.grid += acc.grid;
            total.e_sum += acc.e_sum;
            total.e_sq_sum += acc.e_sq_sum;
        }
        const double n = static_cast<double>(n_samples);
        auto& grid = table.pairs[static_cast<std::size_t>(p)];
        grid.first_label = w1;
        grid.second_label = w2;
        grid.probabilities = total.grid / n;
        grid.e_value = total.e_sum / n;
        const double var = std::max(0.0, total.e_sq_sum / n - grid.e_value * grid.e_value);
        grid.e_stderr = std::sqrt(var / n);
    }
    return table;  // no quadrivariate: the four ensembles are context-bound
}

McDistribution trajectory_single_probability(const TrajectoryModel& model,
                                             const std::string& label,
                                             std::size_t n_samples, std::uint64_t seed) {
    const auto ctx = model.context_samplers.find(label);
    if (ctx == model.context_samplers.end()) {
        throw std::invalid_argument(fmt::format(
            "trajectory_single_probability: missing context sampler '{}'", label));
    }
    HVModel shim;
    shim.sampler = ctx->second;
    shim.responses["x"] = find_response(model.responses, label);
    return hv_single_probability(shim, "x", n_samples, seed);
}

double chsh_value(const CorrelationTable& table) {
    std::array<double, 4> e{};
    double norm_defect = 0.0;
    for (int p = 0; p < 4; ++p) {
        const auto& grid = table.pairs[static_cast<std::size_t>(p)];
        e[static_cast<std::size_t>(p)] = grid_e(grid.probabilities);
        norm_defect = std::max(norm_defect, std::abs(grid.probabilities.sum() - 1.0));
    }
    if (norm_defect > 1e-6) {
        throw std::invalid_argument("chsh_value: grids are not normalized");
    }
    const double sum = e[0] + e[1] + e[2] + e[3];
    double best = 0.0;
    for (int p = 0; p < 4; ++p) {
        best = std::max(best, std::abs(sum - 2.0 * e[static_cast<std::size_t>(p)]));
    }
    return best;
}

CorrelationTable quantum_correlation_table(const StateVector& state, const DiscretePVM& a1,
                                           const DiscretePVM& b1, const DiscretePVM& a2,
                                           const DiscretePVM& b2) {
    for (const DiscretePVM* pvm : {&a1, &b1, &a2, &b2}) {
        if (pvm->size() != 2) {
            throw std::invalid_argument("quantum_correlation_table: PVMs must be dichotomic");
        }
    }
    CorrelationTable table;
    const std::array<std::pair<const DiscretePVM*, const DiscretePVM*>, 4> pairs = {
        std::pair{&a1, &a2}, std::pair{&a1, &b2}, std::pair{&b1, &a2}, std::pair{&b1, &b2}};
    const std::array<std::pair<std::string, std::string>, 4> names = {
        std::pair{std::string("a1"), std::string("a2")}, std::pair{std::string("a1"), std::string("b2")},
        std::pair{std::string("b1"), std::string("a2")}, std::pair{std::string("b1"), std::string("b2")}};
    for (int p = 0; p < 4; ++p) {
        const EPRScenario scenario{state, *pairs[static_cast<std::size_t>(p)].first,
                                   *pairs[static_cast<std::size_t>(p)].second};
        const RealMatrix grid = joint_probability(scenario);
        auto& out = table.pairs[static_cast<std::size_t>(p)];
        out.first_label = names[static_cast<std::size_t>(p)].first;
        out.second_label = names[static_cast<std::size_t>(p)].second;
        out.probabilities = grid;
        out.e_value = grid_e(out.probabilities);
        out.e_stderr = 0.0;
    }
    return table;
}

JointFeasibility joint_distribution_exists(const CorrelationTable& table, double tolerance) {
    // Linear system: 16 grid entries as mixtures of the 16 deterministic
    // local assignments v = (i,j,k,l).
    RealMatrix a = RealMatrix::Zero(16, 16);
    Eigen::VectorXd d(16);
    for (int p = 0; p < 4; ++p) {
        const auto& grid = table.pairs[static_cast<std::size_t>(p)].probabilities;
        for (int x = 0; x < 2; ++x) {
            for (int y = 0; y < 2; ++y) {
                const int row = p * 4 + x * 2 + y;
                d[row] = grid(x, y);
                for (int v = 0; v < 16; ++v) {
                    const int vi = (v >> 3) & 1, vj = (v >> 2) & 1, vk = (v >> 1) & 1,
                              vl = v & 1;
                    const bool hit = (p == 0 && vi == x && vk == y) ||
                                     (p == 1 && vi == x && vl == y) ||
                                     (p == 2 && vj == x && vk == y) ||
                                     (p == 3 && vj == x && vl == y);
                    if (hit) a(row, v) = 1.0;
                }
            }
        }
    }

    // Lawson-Hanson nonnegative least squares; terminates finitely.
    Eigen::VectorXd w = Eigen::VectorXd::Zero(16);
    std::array<bool, 16> passive{};
    Eigen::VectorXd residual_vec = d;
    for (int outer = 0; outer < 200; ++outer) {
        const Eigen::VectorXd gradient = a.transpose() * residual_vec;
        int best = -1;
        double best_g = 1e-11;
        for (int v = 0; v < 16; ++v) {
            if (!passive[static_cast<std::size_t>(v)] && gradient[v] > best_g) {
                best_g = gradient[v];
                best = v;
            }
        }
        if (best < 0) break;
        passive[static_cast<std::size_t>(best)] = true;

        for (int inner = 0; inner < 100; ++inner) {
            std::vector<int> active_cols;
            for (int v = 0; v < 16; ++v)
                if (passive[static_cast<std::size_t>(v)]) active_cols.push_back(v);
            RealMatrix sub(16, static_cast<Eigen::Index>(active_cols.size()));
            for (std::size_t c = 0; c < active_cols.size(); ++c)
                sub.col(static_cast<Eigen::Index>(c)) = a.col(active_cols[c]);
            const Eigen::VectorXd z =
                sub.completeOrthogonalDecomposition().solve(d);
            if (z.minCoeff() > 1e-12) {
                w.setZero();
                for (std::size_t c = 0; c < active_cols.size(); ++c)
                    w[active_cols[c]] = z[static_cast<Eigen::Index>(c)];
                break;
            }
            double alpha = 1.0;
            for (std::size_t c = 0; c < active_cols.size(); ++c) {
                const double zc = z[static_cast<Eigen::Index>(c)];
                if (zc <= 1e-12) {
                    const double wc = w[active_cols[c]];
                    if (wc - zc > 0.0) alpha = std::min(alpha, wc / (wc - zc));
                }
            }
            for (std::size_t c = 0; c < active_cols.size(); ++c) {
                const int v = active_cols[c];
                w[v] += alpha * (z[static_cast<Eigen::Index>(c)] - w[v]);
                if (w[v] <= 1e-12) {
                    w[v] = 0.0;
                    passive[static_cast<std::size_t>(v)] = false;
                }
            }
        }
        residual_vec = d - a * w;
    }

    JointFeasibility out;
    out.residual = residual_vec.norm();
    out.feasible = out.residual <= tolerance;
    const double total = w.sum();
    for (int v = 0; v < 16; ++v) {
        out.witness[static_cast<std::size_t>(v)] = total > 0.0 ? w[v] / total : 1.0 / 16.0;
    }

    std::array<double, 4> e{};
    for (int p = 0; p < 4; ++p) {
        e[static_cast<std::size_t>(p)] =
            grid_e(table.pairs[static_cast<std::size_t>(p)].probabilities);
    }
    const double sum = e[0] + e[1] + e[2] + e[3];
    int worst = 0;
    for (int p = 0; p < 4; ++p) {
        if (std::abs(sum - 2.0 * e[static_cast<std::size_t>(p)]) >
            std::abs(sum - 2.0 * e[static_cast<std::size_t>(worst)])) {
            worst = p;
        }
    }
    out.max_chsh = std::abs(sum - 2.0 * e[static_cast<std::size_t>(worst)]);
    if (!out.feasible) {
        std::string expr;
        for (int p = 0; p < 4; ++p) {
            const auto& grid = table.pairs[static_cast<std::size_t>(p)];
            const char sign = (p == worst) ? '-' : '+';
            if (!expr.empty() || sign == '-') expr += fmt::format(" {} ", sign);
            expr += fmt::format("E({},{})", grid.first_label, grid.second_label);
        }
        out.certificate = fmt::format("|{}| = {:.9f} > 2", expr, out.max_chsh);
    }
    return out;
}

HVModel make_sphere_model(const std::map<std::string, Eigen::Vector3d>& wing1_axes,
                          const std::map<std::string, Eigen::Vector3d>& wing2_axes) {
    HVModel model;
    model.sampler = [](Xoshiro256& rng) {
        double v[3];
        rng.unit_sphere(v);
        return HiddenState{v[0], v[1], v[2]};
    };
    const auto dot = [](const Eigen::Vector3d& axis, const HiddenState& s) {
        return axis.x() * s[0] + axis.y() * s[1] + axis.z() * s[2];
    };
    for (const auto& [label, axis] : wing1_axes) {
        const Eigen::Vector3d n = axis.normalized();
        model.responses[label] = [n, dot](const HiddenState& s) {
            return dot(n, s) >= 0.0 ? std::vector<double>{1.0, 0.0}
                                    : std::vector<double>{0.0, 1.0};
        };
    }
    for (const auto& [label, axis] : wing2_axes) {
        const Eigen::Vector3d n = axis.normalized();
        model.responses[label] = [n, dot](const HiddenState& s) {
            // wing 2 answers -sign(b.lambda)
            return dot(n, s) >= 0.0 ? std::vector<double>{0.0, 1.0}
                                    : std::vector<double>{1.0, 0.0};
        };
    }
    return model;
}

TrajectoryModel make_contextual_reference_model(
    const std::map<std::string, Eigen::Vector3d>& wing1_axes,
    const std::map<std::string, Eigen::Vector3d>& wing2_axes) {
    TrajectoryModel model;
    const auto weighted_sampler = [](const Eigen::Vector3d& axis) {
        const Eigen::Vector3d n = axis.normalized();
        return [n](Xoshiro256& rng) {
            // Rejection sampling for density proportional to |axis.lambda|.
            for (;;) {
                double v[3];
                rng.unit_sphere(v);
                const double weight = std::abs(n.x() * v[0] + n.y() * v[1] + n.z() * v[2]);
                if (rng.uniform() < weight) return HiddenState{v[0], v[1], v[2]};
            }
        };
    };
    for (const auto& [l1, axis1] : wing1_axes) {
        model.context_samplers[l1] = weighted_sampler(axis1);
        for (const auto& [l2, axis2] : wing2_axes) {
            (void)axis2;
            // the conditioning density follows the wing-1 arrangement
            model.context_samplers[context_key(l1, l2)] = weighted_sampler(axis1);
        }
    }
    for (const auto& [l2, axis2] : wing2_axes) {
        model.context_samplers[l2] = weighted_sampler(axis2);
    }
    const auto dot = [](const Eigen::Vector3d& axis, const HiddenState& s) {
        return axis.x() * s[0] + axis.y() * s[1] + axis.z() * s[2];
    };
    for (const auto& [label, axis] : wing1_axes) {
        const Eigen::Vector3d n = axis.normalized();
        model.responses[label] = [n, dot](const HiddenState& s) {
            return dot(n, s) >= 0.0 ? std::vector<double>{1.0, 0.0}
                                    : std::vector<double>{0.0, 1.0};
        };
    }
    for (const auto& [label, axis] : wing2_axes) {
        const Eigen::Vector3d n = axis.normalized();
        model.responses[label] = [n, dot](const HiddenState& s) {
            return dot(n, s) >= 0.0 ? std::vector<double>{0.0, 1.0}
                                    : std::vector<double>{1.0, 0.0};
        };
    }
    return model;
}

}  // namespace qmeas
