#pragma once

#include "qmeas/linalg.hpp"

#include <vector>

namespace qmeas {

/// Normalized pure state. Construction checks the norm (1e-10).
class StateVector {
public:
    explicit StateVector(ComplexVector amplitudes);

    int dim() const { return static_cast<int>(amplitudes_.size()); }
    const ComplexVector& amplitudes() const { return amplitudes_; }

private:
    ComplexVector amplitudes_;
};

/// Trace-one positive-semidefinite Hermitian operator. Construction checks
/// Hermiticity, trace and eigenvalue positivity (all at 1e-10) and stores the
/// symmetrized matrix.
class DensityOperator {
public:
    explicit DensityOperator(ComplexMatrix matrix);

    int dim() const { return static_cast<int>(matrix_.rows()); }
    const ComplexMatrix& matrix() const { return matrix_; }

private:
    ComplexMatrix matrix_;
};

/// Biorthogonal expansion of a bipartite pure state:
///   |psi> = sum_i c_i |left_i> |right_i>,  c_i > 0 descending.
/// Coefficients below 1e-10 are dropped, so coefficients.size() is the
/// Schmidt rank. When coefficients coincide the basis inside the degenerate
/// block is fixed by the linalg phase convention; any unitary rotation within
/// that block would be equally valid mathematically.
struct SchmidtForm {
    std::vector<double> coefficients;
    std::vector<ComplexVector> left_basis;
    std::vector<ComplexVector> right_basis;

    int rank() const { return static_cast<int>(coefficients.size()); }
    /// sum_i c_i |left_i>|right_i> as a full vector (for round-trip checks).
    ComplexVector reconstruct(Dims dims) const;
};

/// Rank-1 projector |v><v|.
DensityOperator density_from_pure(const StateVector& v);

/// Schmidt (polar) decomposition via SVD of the coefficient matrix; the bases
/// are eigenvectors of the respective reduced density operators.
SchmidtForm schmidt_decompose(const StateVector& v, Dims dims);

/// Reduced state of one party of a composite density operator.
DensityOperator reduce(const DensityOperator& rho, Dims dims, Subsystem keep);

}  // namespace qmeas
