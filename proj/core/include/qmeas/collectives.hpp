#pragma once

#include "qmeas/observables.hpp"
#include "qmeas/sequence.hpp"
#include "qmeas/states.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace qmeas {

/// Place-selection rules. Admissibility in the von Mises sense is structural:
/// a rule's decision at position n is computed from things that cannot
/// include values[n] -- the position itself, the strictly prior values (and
/// prior side-channel labels), or the current side-channel label.
struct EveryKthRule {
    std::size_t k = 1;
    std::size_t offset = 0;
};

struct HistoryRule {
    std::string name;
    /// Receives values[0..n-1] and the matching side-channel prefix (empty
    /// span when the sequence has none).
    std::function<bool(std::span<const int>, std::span<const int>)> predicate;
};

struct SideChannelRule {
    std::string name;
    std::function<bool(int)> predicate;
};

using SelectionRule = std::variant<EveryKthRule, HistoryRule, SideChannelRule>;

std::string rule_name(const SelectionRule& rule);

/// Subsequence picked by the rule, in original order, side channel carried
/// along. Side-channel rules require the sequence to have a side channel.
OutcomeSequence select(const OutcomeSequence& seq, const SelectionRule& rule);

struct RuleOutcomeReport {
    std::string rule;
    int outcome = 0;
    double freq_full = 0.0;
    double freq_sub = 0.0;
    double z = 0.0;            // selected vs unselected two-proportion z
    bool inhomogeneous = false;
    bool degenerate = false;   // side channel ~ value; excluded from verdict
};

struct HomogeneityReport {
    std::vector<RuleOutcomeReport> rows;
    double alpha = 0.0;
    double critical_z = 0.0;  // after Bonferroni over rules x outcomes
    bool inhomogeneous = false;
};

/// Tests whether each rule's subsequence reproduces the full-sequence
/// relative frequencies. Per rule and outcome a two-proportion z statistic
/// compares the selected against the unselected part (the calibrated version
/// of sub-vs-full); the verdict applies a Bonferroni correction across all
/// comparisons. A side-channel rule whose labels are empirically equivalent
/// to the values themselves (|Pearson r| > 0.999) is reported as degenerate
/// and excluded: selecting on it would amount to selecting on the outcome.
/// Requires every outcome to appear at least 30 times overall.
HomogeneityReport homogeneity_test(const OutcomeSequence& seq,
                                   const std::vector<SelectionRule>& rules, double alpha);

/// Samples n coincidences from the joint distribution of (pvm1 x pvm2) in a
/// bipartite state. Each wing's sequence carries the other wing's outcomes
/// as its side channel. Deterministic per seed.
std::pair<OutcomeSequence, OutcomeSequence> generate_epr_sequences(
    const StateVector& state, const DiscretePVM& pvm1, const DiscretePVM& pvm2,
    std::size_t n, std::uint64_t seed);

}  // namespace qmeas
