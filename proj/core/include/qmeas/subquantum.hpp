#pragma once

#include "qmeas/observables.hpp"
#include "qmeas/rng.hpp"
#include "qmeas/states.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qmeas {

/// Hidden configuration of a single emission event.
using HiddenState = std::vector<double>;

/// Detection model p(outcome i | hidden state); must return a probability
/// vector (nonnegative, summing to 1) for every state it is handed.
using ResponseFunction = std::function<std::vector<double>(const HiddenState&)>;

struct WeightedState {
    HiddenState state;
    double weight = 0.0;
};

/// Instantaneous hidden-variable model: one distribution over hidden states,
/// shared by all measurement arrangements, with per-observable response
/// functions. Bipartite responses factorize by construction (wing responses
/// are evaluated independently on the same hidden state).
struct HVModel {
    /// Draws a hidden state; required for Monte Carlo estimation.
    std::function<HiddenState(Xoshiro256&)> sampler;
    /// Optional finite support; enables exact integration (weights
    /// normalized at use).
    std::vector<WeightedState> finite_support;
    /// Response function per observable label.
    std::map<std::string, ResponseFunction> responses;
};

/// Trajectory model: the conditioning state is drawn from a density that
/// depends on the measurement context, so different setting pairs may use
/// entirely different trajectory spaces.
struct TrajectoryModel {
    /// Keyed by context_key(wing1, wing2) for coincidence contexts and by a
    /// bare label for single-setting contexts.
    std::map<std::string, std::function<HiddenState(Xoshiro256&)>> context_samplers;
    std::map<std::string, ResponseFunction> responses;
};

std::string context_key(const std::string& wing1_label, const std::string& wing2_label);

/// The four CHSH setting labels: wing 1 chooses a1 or b1, wing 2 a2 or b2.
struct SettingLabels {
    std::string a1;
    std::string b1;
    std::string a2;
    std::string b2;
};

/// One dichotomic coincidence grid. Outcome index 0 means +1, index 1 means
/// -1; rows are wing-1 outcomes.
struct PairGrid {
    std::string first_label;
    std::string second_label;
    Eigen::Matrix2d probabilities = Eigen::Matrix2d::Zero();
    double e_value = 0.0;   // sum_ij i*j*p(i,j) with outcomes +-1
    double e_stderr = 0.0;  // Monte Carlo standard error of e_value; 0 if exact
};

/// Grids for the pairs (a1,a2), (a1,b2), (b1,a2), (b1,b2), in that order.
/// `quadrivariate`, present only when all four grids were conditioned on the
/// same hidden-state ensemble, holds p(i,j,k,l) for outcomes of
/// (a1, b1, a2, b2) at flat index i*8 + j*4 + k*2 + l.
struct CorrelationTable {
    std::array<PairGrid, 4> pairs;
    std::optional<std::array<double, 16>> quadrivariate;
};

struct McDistribution {
    std::vector<double> probabilities;
    std::vector<double> std_errors;
};

/// Monte Carlo estimate of the single-observable outcome distribution of an
/// instantaneous-lambda model. Exactly normalized.
McDistribution hv_single_probability(const HVModel& model, const std::string& label,
                                     std::size_t n_samples, std::uint64_t seed);

/// Monte Carlo table for the four setting pairs. Every hidden-state sample
/// is shared across all four pairs, which is what makes the quadrivariate
/// distribution assemblable (and Bell-bounded).
CorrelationTable hv_correlation_table(const HVModel& model, const SettingLabels& settings,
                                      std::size_t n_samples, std::uint64_t seed);

/// Exact-integration table; requires finite_support.
CorrelationTable hv_correlation_table_exact(const HVModel& model,
                                            const SettingLabels& settings);

/// Monte Carlo table for a trajectory model: each setting pair draws from
/// its own context sampler. No quadrivariate distribution exists in general,
/// so none is assembled.
CorrelationTable trajectory_correlation(const TrajectoryModel& model,
                                        const SettingLabels& settings,
                                        std::size_t n_samples, std::uint64_t seed);

/// Single-setting marginal of a trajectory model (uses the bare-label
/// context sampler).
McDistribution trajectory_single_probability(const TrajectoryModel& model,
                                             const std::string& label,
                                             std::size_t n_samples, std::uint64_t seed);

/// Max |S| over the four sign placements of
///   S = E(a1,a2) + E(a1,b2) + E(b1,a2) - E(b1,b2).
double chsh_value(const CorrelationTable& table);

/// Exact quantum table for dichotomic PVM pairs measured on a bipartite
/// state (no Monte Carlo).
CorrelationTable quantum_correlation_table(const StateVector& state, const DiscretePVM& a1,
                                           const DiscretePVM& b1, const DiscretePVM& a2,
                                           const DiscretePVM& b2);

struct JointFeasibility {
    bool feasible = false;
    /// Euclidean distance between the table's 16 grid entries and the
    /// closest mixture of deterministic local assignments.
    double residual = 0.0;
    /// Mixture weights over the 16 deterministic assignments (i,j,k,l) at
    /// flat index i*8+j*4+k*2+l; a witness quadrivariate when feasible, the
    /// closest approximation otherwise.
    std::array<double, 16> witness{};
    double max_chsh = 0.0;
    /// Human-readable maximally violated CHSH variant when infeasible.
    std::string certificate;
};

/// Decides whether one quadrivariate distribution reproduces all four grids
/// as marginals. The mixture weights over the 16 enumerated deterministic
/// local assignments are recovered by active-set nonnegative least squares;
/// feasible means the fit residual is at most `tolerance` (use a multiple of
/// the Monte Carlo standard error for sampled tables).
JointFeasibility joint_distribution_exists(const CorrelationTable& table,
                                           double tolerance = 1e-9);

/// Classic noncontextual sphere model: hidden state uniform on the unit
/// sphere, wing 1 answers sign(a.lambda), wing 2 answers -sign(b.lambda).
/// Yields E(a,b) = -1 + 2*theta_ab/pi.
HVModel make_sphere_model(const std::map<std::string, Eigen::Vector3d>& wing1_axes,
                          const std::map<std::string, Eigen::Vector3d>& wing2_axes);

/// Reference contextual model: in context (a, b) the hidden state is drawn
/// with density proportional to |a.lambda| (the conditioning depends on the
/// arrangement); responses as in the sphere model. Reproduces the singlet
/// correlation E(a,b) = -a.b in expectation.
TrajectoryModel make_contextual_reference_model(
    const std::map<std::string, Eigen::Vector3d>& wing1_axes,
    const std::map<std::string, Eigen::Vector3d>& wing2_axes);

}  // namespace qmeas
