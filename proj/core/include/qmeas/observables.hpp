#pragma once

#include "qmeas/linalg.hpp"
#include "qmeas/sequence.hpp"
#include "qmeas/states.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qmeas {

/// Projection-valued measure: orthogonal Hermitian idempotents summing to
/// the identity. Build through make_pvm, which validates.
struct DiscretePVM {
    std::vector<std::string> labels;
    std::vector<ComplexMatrix> projectors;

    int dim() const { return projectors.empty() ? 0 : static_cast<int>(projectors[0].rows()); }
    std::size_t size() const { return projectors.size(); }
};

/// Positive operator-valued measure: effects with spectrum in [0,1] summing
/// to the identity. Build through make_povm, which validates.
struct DiscretePOVM {
    std::vector<std::string> labels;
    std::vector<ComplexMatrix> effects;

    int dim() const { return effects.empty() ? 0 : static_cast<int>(effects[0].rows()); }
    std::size_t size() const { return effects.size(); }
};

DiscretePVM make_pvm(std::vector<std::string> labels, std::vector<ComplexMatrix> projectors);
DiscretePOVM make_povm(std::vector<std::string> labels, std::vector<ComplexMatrix> effects);

/// A PVM is a POVM.
DiscretePOVM as_povm(const DiscretePVM& pvm);

/// Object-apparatus interaction model: apparatus prepared in
/// `apparatus_initial`, coupled by the unitary `interaction` acting on
/// object (x) apparatus, read out by `pointer_pvm` on the apparatus factor.
struct MeasurementModel {
    DensityOperator apparatus_initial;
    ComplexMatrix interaction;
    DiscretePVM pointer_pvm;
};

/// Outcome distribution p_m = Tr(rho M_m), clipped to [0,1].
std::vector<double> probabilities(const DensityOperator& rho, const DiscretePOVM& povm);

/// Repeated sampling from probabilities(rho, povm); deterministic per seed.
OutcomeSequence sample(const DensityOperator& rho, const DiscretePOVM& povm,
                       std::size_t n, std::uint64_t seed);

/// Reduces a measurement model to the equivalent POVM on the object:
///   M_m = Tr_a[(I (x) rho_a) U^dagger (I (x) E_m) U].
/// The pointer effect is propagated through the interaction as U^dagger E U,
/// matching the convention that U maps initial to final states. Effects that
/// come out with negative eigenvalues beyond tolerance are an error (they
/// indicate a broken model, typically a non-unitary interaction), never
/// silently clipped.
DiscretePOVM compile_povm(const MeasurementModel& model, int object_dim);

struct UncertaintyProduct {
    double delta_a = 0.0;
    double delta_b = 0.0;
    double bound = 0.0;  // |<[A,B]>| / 2
};

/// Standard deviations of two Hermitian observables in a state together with
/// the commutator lower bound on their product (hbar = 1).
UncertaintyProduct uncertainty_product(const DensityOperator& rho, const ComplexMatrix& a,
                                       const ComplexMatrix& b);

/// True when every effect of p commutes with every effect of q (1e-10).
bool is_compatible(const DiscretePOVM& p, const DiscretePOVM& q);

}  // namespace qmeas
