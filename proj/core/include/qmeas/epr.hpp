#pragma once

#include "qmeas/observables.hpp"
#include "qmeas/states.hpp"

namespace qmeas {

/// Two-particle coincidence setup: an entangled state with one standard
/// observable per wing. Subsystem dimensions are taken from the observables.
struct EPRScenario {
    StateVector state;
    DiscretePVM first_observable;
    DiscretePVM second_observable;

    Dims dims() const {
        return Dims{first_observable.dim(), second_observable.dim()};
    }
};

/// Joint outcome grid p(i, j) = <psi| P_i (x) Q_j |psi>; rows index the first
/// observable. Nonnegative, sums to one.
RealMatrix joint_probability(const EPRScenario& s);

/// Conditional distribution of the second outcome given first outcome `row`
/// of a joint grid. Conditioning on a (numerically) zero-probability row is
/// an error.
std::vector<double> conditional_probability(const RealMatrix& grid, int row);

/// State of the second particle prepared by selecting on outcome `outcome`
/// of the first-particle observable:
///   Tr_1[(P_i (x) I) |psi><psi| (P_i (x) I)] / p(i).
/// Works for degenerate (multi-dimensional) projectors, where the result may
/// be mixed.
DensityOperator conditionally_prepared_state(const StateVector& state,
                                             const DiscretePVM& first_pvm, int outcome);

/// The state re-described within the context of a measurement of the PVM:
/// rho_A = sum_m P_m rho P_m. Commutes with every P_m and reproduces the
/// outcome probabilities of rho.
DensityOperator contextual_state(const DensityOperator& rho, const DiscretePVM& pvm);

/// Contextual state of a two-particle pure state within the context of the
/// product measurement a (x) b. Partial traces give the single-particle
/// contextual states of the reduced states, whichever observable the other
/// wing uses.
DensityOperator two_particle_contextual_state(const StateVector& state, const DiscretePVM& a,
                                              const DiscretePVM& b);

}  // namespace qmeas
