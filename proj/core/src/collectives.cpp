#include "qmeas/collectives.hpp"

#include "qmeas/epr.hpp"
#include "qmeas/parallel.hpp"
#include "qmeas/rng.hpp"
#include "qmeas/stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace qmeas {

namespace {

void check_side_channel_length(const OutcomeSequence& seq) {
    if (seq.side_channel.has_value() && seq.side_channel->size() != seq.values.size()) {
        throw std::invalid_argument(fmt::format(
            "OutcomeSequence: side channel length {} does not match {} values",
            seq.side_channel->size(), seq.values.size()));
    }
}

std::vector<char> selection_mask(const OutcomeSequence& seq, const SelectionRule& rule) {
    check_side_channel_length(seq);
    const std::size_t n = seq.size();
    std::vector<char> mask(n, 0);
    if (const auto* every = std::get_if<EveryKthRule>(&rule)) {
        if (every->k == 0) throw std::invalid_argument("EveryKthRule: k must be >= 1");
        for (std::size_t i = every->offset; i < n; i += every->k) mask[i] = 1;
        return mask;
    }
    if (const auto* history = std::get_if<HistoryRule>(&rule)) {
        if (!history->predicate) throw std::invalid_argument("HistoryRule: empty predicate");
        const int* side_data =
            seq.side_channel.has_value() ? seq.side_channel->data() : nullptr;
        for (std::size_t i = 0; i < n; ++i) {
            const std::span<const int> prior_values(seq.values.data(), i);
            const std::span<const int> prior_side =
                side_data ? std::span<const int>(side_data, i) : std::span<const int>();
            if (history->predicate(prior_values, prior_side)) mask[i] = 1;
        }
        return mask;
    }
    const auto& side_rule = std::get<SideChannelRule>(rule);
    if (!side_rule.predicate) throw std::invalid_argument("SideChannelRule: empty predicate");
    if (!seq.side_channel.has_value()) {
        throw std::invalid_argument("SideChannelRule: sequence has no side channel");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (side_rule.predicate((*seq.side_channel)[i])) mask[i] = 1;
    }
    return mask;
}

double pearson(const std::vector<int>& x, const std::vector<int>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

std::string rule_name(const SelectionRule& rule) {
    if (const auto* every = std::get_if<EveryKthRule>(&rule)) {
        return fmt::format("every_{}th_offset_{}", every->k, every->offset);
    }
    if (const auto* history = std::get_if<HistoryRule>(&rule)) return history->name;
    return std::get<SideChannelRule>(rule).name;
}

OutcomeSequence select(const OutcomeSequence& seq, const SelectionRule& rule) {
    const std::vector<char> mask = selection_mask(seq, rule);
    OutcomeSequence out;
    if (seq.side_channel.has_value()) out.side_channel.emplace();
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (!mask[i]) continue;
        out.values.push_back(seq.values[i]);
        if (seq.side_channel.has_value()) out.side_channel->push_back((*seq.side_channel)[i]);
    }
    return out;
}

HomogeneityReport homogeneity_test(const OutcomeSequence& seq,
                                   const std::vector<SelectionRule>& rules, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("homogeneity_test: alpha must be in (0,1)");
    }
    if (rules.empty()) throw std::invalid_argument("homogeneity_test: no rules");
    const std::size_t n = seq.size();

    std::map<int, std::size_t> full_counts;
    for (const int v : seq.values) ++full_counts[v];
    for (const auto& [outcome, count] : full_counts) {
        if (count < 30) {
            throw std::invalid_argument(fmt::format(
                "homogeneity_test: outcome {} occurs {} times; need >= 30 for the "
                "normal approximation",
                outcome, count));
        }
    }

    HomogeneityReport report;
    report.alpha = alpha;
    const std::size_t comparisons = rules.size() * full_counts.size();
    const double corrected = alpha / static_cast<double>(comparisons);
    report.critical_z = normal_quantile(1.0 - corrected / 2.0);

    for (const auto& rule : rules) {
        const std::vector<char> mask = selection_mask(seq, rule);
        const std::size_t n_sub =
            static_cast<std::size_t>(std::count(mask.begin(), mask.end(), char(1)));
        const std::size_t n_comp = n - n_sub;

        bool degenerate = false;
        if (std::holds_alternative<SideChannelRule>(rule) && seq.side_channel.has_value()) {
            degenerate = std::abs(pearson(seq.values, *seq.side_channel)) > 0.999;
        }

        for (const auto& [outcome, full_count] : full_counts) {
            RuleOutcomeReport row;
            row.rule = rule_name(rule);
            row.outcome = outcome;
            row.degenerate = degenerate;
            row.freq_full = static_cast<double>(full_count) / static_cast<double>(n);

            std::size_t sub_count = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (mask[i] && seq.values[i] == outcome) ++sub_count;
            }
            row.freq_sub =
                n_sub > 0 ? static_cast<double>(sub_count) / static_cast<double>(n_sub) : 0.0;

            if (n_sub > 0 && n_comp > 0) {
                const double p_sub = row.freq_sub;
                const double p_comp = static_cast<double>(full_count - sub_count) /
                                      static_cast<double>(n_comp);
                const double pooled = row.freq_full;
                const double se =
                    std::sqrt(pooled * (1.0 - pooled) *
                              (1.0 / static_cast<double>(n_sub) +
                               1.0 / static_cast<double>(n_comp)));
                row.z = se > 0.0 ? (p_sub - p_comp) / se : 0.0;
            }
            row.inhomogeneous = std::abs(row.z) > report.critical_z;
            if (row.inhomogeneous && !degenerate) report.inhomogeneous = true;
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

std::pair<OutcomeSequence, OutcomeSequence> generate_epr_sequences(
    const StateVector& state, const DiscretePVM& pvm1, const DiscretePVM& pvm2,
    std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("generate_epr_sequences: n must be >= 1");
    const EPRScenario scenario{state, pvm1, pvm2};
    const RealMatrix grid = joint_probability(scenario);
    const Eigen::Index n2 = grid.cols();

    std::vector<double> cdf(static_cast<std::size_t>(grid.size()));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
        for (Eigen::Index j = 0; j < n2; ++j) {
            acc += grid(i, j);
            cdf[static_cast<std::size_t>(i * n2 + j)] = acc;
        }
    }
    for (auto& c : cdf) c /= acc;
    cdf.back() = 1.0;

    OutcomeSequence first, second;
    first.values.resize(n);
    first.side_channel.emplace(n);
    second.values.resize(n);
    second.side_channel.emplace(n);

    const std::size_t chunks = (n + kMonteCarloChunk - 1) / kMonteCarloChunk;
    run_chunks(chunks, [&](std::size_t c) {
        Xoshiro256 rng(derive_seed(seed, "collectives.epr", c));
        const std::size_t begin = c * kMonteCarloChunk;
        const std::size_t count = std::min(kMonteCarloChunk, n - begin);
        for (std::size_t t = 0; t < count; ++t) {
            const double u = rng.uniform();
            const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            const auto flat = static_cast<Eigen::Index>(std::distance(cdf.begin(), it));
            const int i = static_cast<int>(flat / n2);
            const int j = static_cast<int>(flat % n2);
            first.values[begin + t] = i;
            (*first.side_channel)[begin + t] = j;
            second.values[begin + t] = j;
            (*second.side_channel)[begin + t] = i;
        }
    });
    return {std::move(first), std::move(second)};
}

}  // namespace qmeas
