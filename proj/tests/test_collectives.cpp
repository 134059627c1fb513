#include "qmeas/collectives.hpp"

#include "qmeas/epr.hpp"
#include "qmeas/rng.hpp"
#include "support/random_qm.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qmeas;
using namespace qmeas::testing;

namespace {

constexpr double kPi = std::numbers::pi;

SideChannelRule label_rule(int label) {
    return SideChannelRule{"label_" + std::to_string(label),
                           [label](int side) { return side == label; }};
}

// Proper mixture: labels j ~ Bernoulli(1/2); outcome sampled from the
// preparation |j><j| read out in a basis tilted by `angle` from z.
OutcomeSequence proper_mixture_sequence(double angle, std::size_t n, std::uint64_t seed) {
    const double p_plus[2] = {std::cos(angle / 2) * std::cos(angle / 2),
                              std::sin(angle / 2) * std::sin(angle / 2)};
    Xoshiro256 rng(seed);
    OutcomeSequence seq;
    seq.values.resize(n);
    seq.side_channel.emplace(n);
    for (std::size_t t = 0; t < n; ++t) {
        const int label = rng.uniform() < 0.5 ? 0 : 1;
        const int value = rng.uniform() < p_plus[label] ? 0 : 1;
        seq.values[t] = value;
        (*seq.side_channel)[t] = label;
    }
    return seq;
}

}  // namespace

TEST_CASE("select: every-2nd rule halves the sequence") {
    OutcomeSequence seq;
    for (int i = 0; i < 10; ++i) seq.values.push_back(i % 3);
    const OutcomeSequence sub = select(seq, EveryKthRule{2, 0});
    REQUIRE(sub.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(sub.values[i] == seq.values[2 * i]);
}

TEST_CASE("select: side-channel rule extracts the labeled subensemble") {
    OutcomeSequence seq;
    seq.values = {0, 1, 0, 1, 1, 0};
    seq.side_channel = std::vector<int>{0, 0, 1, 1, 0, 1};
    const OutcomeSequence sub = select(seq, label_rule(0));
    CHECK(sub.values == std::vector<int>{0, 1, 1});
    REQUIRE(sub.side_channel.has_value());
    CHECK(*sub.side_channel == std::vector<int>{0, 0, 0});
}

TEST_CASE("select: history rule sees only strictly prior values") {
    OutcomeSequence seq;
    seq.values = {0, 0, 1, 0, 1, 1};
    HistoryRule rule{"prev_is_zero", [](std::span<const int> prior, std::span<const int>) {
                         return !prior.empty() && prior.back() == 0;
                     }};
    const OutcomeSequence sub = select(seq, rule);
    // positions 1,2 follow a 0; position 3 follows a 1; position 4 follows 0
    CHECK(sub.values == std::vector<int>{0, 1, 1});
}

TEST_CASE("select: history rules cannot read the current value") {
    // structural admissibility: the predicate receives a prefix whose length
    // equals the current position, so the current value is unrepresentable
    OutcomeSequence seq;
    seq.values = {5, 7, 9};
    std::vector<std::size_t> seen_lengths;
    HistoryRule rule{"probe", [&](std::span<const int> prior, std::span<const int>) {
                         seen_lengths.push_back(prior.size());
                         return true;
                     }};
    select(seq, rule);
    CHECK(seen_lengths == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("select: side-channel rule without a side channel throws") {
    OutcomeSequence seq;
    seq.values = {0, 1};
    CHECK_THROWS_AS(select(seq, label_rule(0)), std::invalid_argument);
}

TEST_CASE("select: mismatched side-channel length throws") {
    OutcomeSequence seq;
    seq.values = {0, 1, 0};
    seq.side_channel = std::vector<int>{0, 1};
    CHECK_THROWS_AS(select(seq, EveryKthRule{1, 0}), std::invalid_argument);
}

TEST_CASE("homogeneity_test: constant sequence is homogeneous under all rules") {
    OutcomeSequence seq;
    seq.values.assign(2000, 0);
    seq.side_channel.emplace(2000, 0);
    const std::vector<SelectionRule> rules = {
        EveryKthRule{2, 0}, EveryKthRule{3, 1}, SelectionRule(label_rule(0)),
        SelectionRule(HistoryRule{"prev_zero",
                                  [](std::span<const int> prior, std::span<const int>) {
                                      return !prior.empty() && prior.back() == 0;
                                  }})};
    const HomogeneityReport report = homogeneity_test(seq, rules, 0.01);
    CHECK_FALSE(report.inhomogeneous);
    for (const auto& row : report.rows) CHECK(row.freq_full == row.freq_sub);
}

TEST_CASE("homogeneity_test: i.i.d. sequence passes arithmetic selection") {
    Xoshiro256 rng(70);
    OutcomeSequence seq;
    seq.values.resize(20000);
    for (auto& v : seq.values) v = rng.uniform() < 0.5 ? 0 : 1;
    const std::vector<SelectionRule> rules = {EveryKthRule{2, 0}, EveryKthRule{3, 1}};
    const HomogeneityReport report = homogeneity_test(seq, rules, 0.01);
    CHECK_FALSE(report.inhomogeneous);
}

TEST_CASE("homogeneity_test: proper mixture flagged by the preparation label rule") {
    const OutcomeSequence seq = proper_mixture_sequence(kPi / 3, 100000, 71);
    const HomogeneityReport report =
        homogeneity_test(seq, {SelectionRule(label_rule(0))}, 0.01);
    CHECK(report.inhomogeneous);
    bool found = false;
    for (const auto& row : report.rows) {
        if (row.outcome == 0) {
            found = true;
            CHECK_FALSE(row.degenerate);
            // subensemble 0 sees cos^2(pi/6) = 3/4 of outcome 0
            CHECK(row.freq_sub == doctest::Approx(0.75).epsilon(0.02));
            CHECK(std::abs(row.z) > report.critical_z);
        }
    }
    CHECK(found);
}

TEST_CASE("homogeneity_test: improper mixture flagged via a non-Schmidt side channel") {
    // singlet; wing 1 measures spin at pi/4, wing 2 at z. Conditional wing-2
    // laws are (1 -+ cos(pi/4))/2, far enough apart to detect, while the
    // side channel correlates with the value only at |r| ~ 0.707.
    auto [first, second] =
        generate_epr_sequences(singlet(), spin_pvm(kPi / 4, "a"), spin_pvm(0.0, "z"),
                               100000, 72);
    const HomogeneityReport report =
        homogeneity_test(second, {SelectionRule(label_rule(0))}, 0.01);
    CHECK(report.inhomogeneous);
    for (const auto& row : report.rows) {
        CHECK_FALSE(row.degenerate);
        if (row.outcome == 0) {
            const double expected = (1.0 - std::cos(kPi / 4)) / 2.0;  // from the joint law
            CHECK(row.freq_sub == doctest::Approx(expected).epsilon(0.05));
        }
    }
}

TEST_CASE("homogeneity_test: strictly correlated side channel is degenerate") {
    // singlet measured z (x) z: the partner outcome determines the value, so
    // selecting on it is selecting on the value; the rule must be excluded
    auto [first, second] =
        generate_epr_sequences(singlet(), spin_pvm(0.0, "z"), spin_pvm(0.0, "z"), 20000, 73);
    const HomogeneityReport report =
        homogeneity_test(second, {SelectionRule(label_rule(0))}, 0.01);
    for (const auto& row : report.rows) CHECK(row.degenerate);
    CHECK_FALSE(report.inhomogeneous);
}

TEST_CASE("homogeneity_test: i.i.d. false positive rate respects alpha") {
    // 400 seeded runs; expected flags 400*alpha = 4 with sd ~ 2
    const double alpha = 0.01;
    int flags = 0;
    const int runs = 400;
    for (int r = 0; r < runs; ++r) {
        Xoshiro256 rng(derive_seed(1000, "fp_control", static_cast<std::uint64_t>(r)));
        OutcomeSequence seq;
        seq.values.resize(2000);
        seq.side_channel.emplace(2000);
        for (std::size_t t = 0; t < 2000; ++t) {
            seq.values[t] = rng.uniform() < 0.5 ? 0 : 1;
            (*seq.side_channel)[t] = rng.uniform() < 0.5 ? 0 : 1;
        }
        const HomogeneityReport report = homogeneity_test(
            seq, {SelectionRule(EveryKthRule{2, 0}), SelectionRule(label_rule(0))}, alpha);
        flags += report.inhomogeneous ? 1 : 0;
    }
    // binomial 4 sigma band around alpha
    const double sd = std::sqrt(runs * alpha * (1 - alpha));
    CHECK(flags <= runs * alpha + 4 * sd);
}

TEST_CASE("homogeneity_test: short sequences are rejected") {
    OutcomeSequence seq;
    seq.values = {0, 1, 0, 1};
    CHECK_THROWS_AS(homogeneity_test(seq, {SelectionRule(EveryKthRule{2, 0})}, 0.05),
                    std::invalid_argument);
}

TEST_CASE("generate_epr_sequences: singlet in matching bases anti-correlates") {
    auto [first, second] =
        generate_epr_sequences(singlet(), spin_pvm(0.0, "z"), spin_pvm(0.0, "z"), 50000, 74);
    REQUIRE(first.size() == 50000);
    for (std::size_t t = 0; t < first.size(); ++t) {
        REQUIRE(first.values[t] != second.values[t]);
        REQUIRE((*first.side_channel)[t] == second.values[t]);
        REQUIRE((*second.side_channel)[t] == first.values[t]);
    }
}

TEST_CASE("generate_epr_sequences: product state wings are independent") {
    // |+z> (x) |+x>: wing outcomes are independent Bernoulli; chi-square on
    // the 2x2 contingency table stays below the 0.999 quantile (10.83, df=1)
    ComplexVector prod(4);
    const double s = 1.0 / std::sqrt(2.0);
    prod << Complex(s), Complex(s), Complex(0), Complex(0);
    auto [first, second] = generate_epr_sequences(
        StateVector(std::move(prod)), spin_pvm(0.0, "z"), spin_pvm(kPi / 2, "x"), 100000, 75);
    double table[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t t = 0; t < first.size(); ++t) {
        table[first.values[t]][second.values[t]] += 1.0;
    }
    const double n = static_cast<double>(first.size());
    double chi_sq = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double row = table[i][0] + table[i][1];
            const double col = table[0][j] + table[1][j];
            const double expected = row * col / n;
            if (expected > 0) {
                chi_sq += (table[i][j] - expected) * (table[i][j] - expected) / expected;
            }
        }
    CHECK(chi_sq < 10.83);
}

TEST_CASE("generate_epr_sequences: fixed seed reproduces both wings") {
    auto [a1, a2] =
        generate_epr_sequences(singlet(), spin_pvm(0.3, "a"), spin_pvm(1.1, "b"), 5000, 76);
    auto [b1, b2] =
        generate_epr_sequences(singlet(), spin_pvm(0.3, "a"), spin_pvm(1.1, "b"), 5000, 76);
    CHECK(a1.values == b1.values);
    CHECK(a2.values == b2.values);
}

TEST_CASE("generate_epr_sequences: marginals match the reduced-state law") {
    const DiscretePVM tilted = spin_pvm(0.8, "t");
    auto [first, second] =
        generate_epr_sequences(singlet(), spin_pvm(0.0, "z"), tilted, 200000, 77);
    // reduced state of either singlet wing is I/2: marginal 1/2 each
    std::size_t zeros = 0;
    for (const int v : second.values) zeros += (v == 0);
    const double freq = static_cast<double>(zeros) / static_cast<double>(second.size());
    const double sigma = std::sqrt(0.25 / static_cast<double>(second.size()));
    CHECK(std::abs(freq - 0.5) < 4 * sigma);
}
