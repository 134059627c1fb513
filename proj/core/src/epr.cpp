#include "qmeas/epr.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace qmeas {

namespace {

constexpr double kZeroProbability = 1e-12;

void check_bipartite(const StateVector& state, Dims dims, const char* what) {
    if (state.dim() != dims.total()) {
        throw std::invalid_argument(fmt::format(
            "{}: state dim {} does not match {}x{}", what, state.dim(), dims.first,
            dims.second));
    }
}

}  // namespace

RealMatrix joint_probability(const EPRScenario& s) {
    const Dims dims = s.dims();
    check_bipartite(s.state, dims, "joint_probability");
    const auto& psi = s.state.amplitudes();
    RealMatrix grid(s.first_observable.size(), s.second_observable.size());
    for (std::size_t i = 0; i < s.first_observable.size(); ++i) {
        for (std::size_t j = 0; j < s.second_observable.size(); ++j) {
            const ComplexMatrix joint = tensor_product(
                s.first_observable.projectors[i], s.second_observable.projectors[j]);
            const double p = (psi.adjoint() * joint * psi).value().real();
            grid(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::max(0.0, p);
        }
    }
    return grid;
}

std::vector<double> conditional_probability(const RealMatrix& grid, int row) {
    if (row < 0 || row >= grid.rows()) {
        throw std::invalid_argument("conditional_probability: row out of range");
    }
    const double marginal = grid.row(row).sum();
    if (marginal <= kZeroProbability) {
        throw std::invalid_argument(fmt::format(
            "conditional_probability: conditioning on outcome {} with probability {:.3e}",
            row, marginal));
    }
    std::vector<double> out(static_cast<std::size_t>(grid.cols()));
    for (Eigen::Index j = 0; j < grid.cols(); ++j) {
        out[static_cast<std::size_t>(j)] = grid(row, j) / marginal;
    }
    return out;
}

DensityOperator conditionally_prepared_state(const StateVector& state,
                                             const DiscretePVM& first_pvm, int outcome) {
    if (outcome < 0 || outcome >= static_cast<int>(first_pvm.size())) {
        throw std::invalid_argument("conditionally_prepared_state: outcome out of range");
    }
    const int d1 = first_pvm.dim();
    if (state.dim() % d1 != 0) {
        throw std::invalid_argument(fmt::format(
            "conditionally_prepared_state: state dim {} not divisible by first dim {}",
            state.dim(), d1));
    }
    const Dims dims{d1, state.dim() / d1};
    const ComplexMatrix projector = tensor_product(
        first_pvm.projectors[static_cast<std::size_t>(outcome)],
        ComplexMatrix::Identity(dims.second, dims.second));
    const ComplexVector projected = projector * state.amplitudes();
    const double probability = projected.squaredNorm();
    if (probability <= kZeroProbability) {
        throw std::invalid_argument(fmt::format(
            "conditionally_prepared_state: outcome {} has probability {:.3e}", outcome,
            probability));
    }
    const ComplexMatrix sandwiched = projected * projected.adjoint() / probability;
    return DensityOperator(partial_trace(sandwiched, dims, Subsystem::second));
}

DensityOperator contextual_state(const DensityOperator& rho, const DiscretePVM& pvm) {
    if (rho.dim() != pvm.dim()) {
        throw std::invalid_argument(fmt::format(
            "contextual_state: state dim {} vs PVM dim {}", rho.dim(), pvm.dim()));
    }
    ComplexMatrix out = ComplexMatrix::Zero(rho.dim(), rho.dim());
    for (const auto& p : pvm.projectors) out += p * rho.matrix() * p;
    return DensityOperator(std::move(out));
}

DensityOperator two_particle_contextual_state(const StateVector& state, const DiscretePVM& a,
                                              const DiscretePVM& b) {
    const Dims dims{a.dim(), b.dim()};
    check_bipartite(state, dims, "two_particle_contextual_state");
    std::vector<std::string> labels;
    std::vector<ComplexMatrix> projectors;
    labels.reserve(a.size() * b.size());
    projectors.reserve(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            labels.push_back(a.labels[i] + "*" + b.labels[j]);
            projectors.push_back(tensor_product(a.projectors[i], b.projectors[j]));
        }
    }
    const DiscretePVM product = make_pvm(std::move(labels), std::move(projectors));
    return contextual_state(density_from_pure(state), product);
}

}  // namespace qmeas
