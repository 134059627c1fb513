#include "qmeas/states.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace qmeas {

StateVector::StateVector(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() == 0) {
        throw std::invalid_argument("StateVector: empty amplitude vector");
    }
    if (!amplitudes_.allFinite()) {
        throw std::invalid_argument("StateVector: non-finite amplitudes");
    }
    const double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > 1e-10) {
        throw std::invalid_argument(
            fmt::format("StateVector: not normalized (|v| = {:.12f})", norm));
    }
}

DensityOperator::DensityOperator(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
        throw std::invalid_argument("DensityOperator: matrix must be square");
    }
    if (!all_finite(matrix_)) {
        throw std::invalid_argument("DensityOperator: non-finite entries");
    }
    const double defect = hermiticity_defect(matrix_);
    if (defect > kHermitianTol) {
        throw std::invalid_argument(fmt::format(
            "DensityOperator: not Hermitian (defect {:.3e})", defect));
    }
    matrix_ = 0.5 * (matrix_ + matrix_.adjoint().eval());
    const double trace = matrix_.trace().real();
    if (std::abs(trace - 1.0) > 1e-10) {
        throw std::invalid_argument(
            fmt::format("DensityOperator: trace {} != 1", trace));
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10) {
        throw std::invalid_argument(fmt::format(
            "DensityOperator: negative eigenvalue {:.3e}", solver.eigenvalues().minCoeff()));
    }
}

ComplexVector SchmidtForm::reconstruct(Dims dims) const {
    ComplexVector out = ComplexVector::Zero(dims.total());
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
        for (int i = 0; i < dims.first; ++i) {
            for (int j = 0; j < dims.second; ++j) {
                out[i * dims.second + j] +=
                    coefficients[k] * left_basis[k][i] * right_basis[k][j];
            }
        }
    }
    return out;
}

DensityOperator density_from_pure(const StateVector& v) {
    return DensityOperator(v.amplitudes() * v.amplitudes().adjoint());
}

SchmidtForm schmidt_decompose(const StateVector& v, Dims dims) {
    if (dims.first <= 0 || dims.second <= 0 || v.dim() != dims.total()) {
        throw std::invalid_argument(fmt::format(
            "schmidt_decompose: state dim {} does not equal {}x{}", v.dim(),
            dims.first, dims.second));
    }
    // Coefficient matrix c(i,j) = <i|<j|psi>.
    ComplexMatrix c(dims.first, dims.second);
    for (int i = 0; i < dims.first; ++i)
        for (int j = 0; j < dims.second; ++j) c(i, j) = v.amplitudes()[i * dims.second + j];

    const SvdResult dec = svd(c);
    SchmidtForm out;
    for (Eigen::Index k = 0; k < dec.singular_values.size(); ++k) {
        const double s = dec.singular_values[k];
        if (s <= 1e-10) break;  // descending, rest are numerically zero
        out.coefficients.push_back(s);
        out.left_basis.emplace_back(dec.u.col(k));
        // c = u diag(s) v^dagger expands |psi> with the conjugated v columns.
        out.right_basis.emplace_back(dec.v.col(k).conjugate());
    }
    return out;
}

DensityOperator reduce(const DensityOperator& rho, Dims dims, Subsystem keep) {
    if (rho.dim() != dims.total()) {
        throw std::invalid_argument(fmt::format(
            "reduce: operator dim {} does not equal {}x{}", rho.dim(), dims.first,
            dims.second));
    }
    return DensityOperator(partial_trace(rho.matrix(), dims, keep));
}

}  // namespace qmeas
