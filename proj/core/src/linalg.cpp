#include "qmeas/linalg.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qmeas {

namespace {

void require_finite(const ComplexMatrix& m, const char* what) {
    if (!all_finite(m)) {
        throw std::invalid_argument(fmt::format("{}: non-finite entries", what));
    }
}

// Rotates v so its largest-magnitude component (first index on ties) is real
// and positive.
void canonicalize_phase(Eigen::Ref<ComplexVector> v) {
    Eigen::Index pivot = 0;
    double best = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > best) {
            best = a;
            pivot = i;
        }
    }
    if (best <= 0.0) return;
    v *= std::conj(v[pivot]) / best;
}

// Deterministic orthonormal basis for the column space of projector p
// (rank = count): standard basis vectors are projected in index order and
// Gram-Schmidt-ed; near-dependent candidates are skipped.
std::vector<ComplexVector> canonical_subspace_basis(const ComplexMatrix& p, int count) {
    std::vector<ComplexVector> basis;
    basis.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index idx = 0; idx < p.cols() && std::ssize(basis) < count; ++idx) {
        ComplexVector w = p.col(idx);
        for (const auto& b : basis) w -= b.dot(w) * b;
        const double norm = w.norm();
        if (norm < 1e-6) continue;
        w /= norm;
        canonicalize_phase(w);
        basis.push_back(std::move(w));
    }
    return basis;
}

}  // namespace

bool all_finite(const ComplexMatrix& m) {
    return m.allFinite();
}

double hermiticity_defect(const ComplexMatrix& m) {
    return (m - m.adjoint()).norm();
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_finite(a, "tensor_product");
    require_finite(b, "tensor_product");
    if (a.rows() > kMaxSubsystemDim || a.cols() > kMaxSubsystemDim ||
        b.rows() > kMaxSubsystemDim || b.cols() > kMaxSubsystemDim) {
        throw std::invalid_argument(fmt::format(
            "tensor_product: factor exceeds the {}-dimensional cap ({}x{} and {}x{})",
            kMaxSubsystemDim, a.rows(), a.cols(), b.rows(), b.cols()));
    }
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, Dims dims, Subsystem keep) {
    if (dims.first <= 0 || dims.second <= 0) {
        throw std::invalid_argument("partial_trace: dims must be positive");
    }
    if (m.rows() != m.cols() || m.rows() != dims.total()) {
        throw std::invalid_argument(fmt::format(
            "partial_trace: matrix side {} does not match dims {}x{}", m.rows(),
            dims.first, dims.second));
    }
    require_finite(m, "partial_trace");
    const int d1 = dims.first;
    const int d2 = dims.second;
    if (keep == Subsystem::first) {
        ComplexMatrix out = ComplexMatrix::Zero(d1, d1);
        for (int i = 0; i < d1; ++i)
            for (int j = 0; j < d1; ++j)
                for (int k = 0; k < d2; ++k) out(i, j) += m(i * d2 + k, j * d2 + k);
        return out;
    }
    ComplexMatrix out = ComplexMatrix::Zero(d2, d2);
    for (int i = 0; i < d2; ++i)
        for (int j = 0; j < d2; ++j)
            for (int k = 0; k < d1; ++k) out(i, j) += m(k * d2 + i, k * d2 + j);
    return out;
}

HermitianDecomposition eig_hermitian(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("eig_hermitian: matrix must be square");
    }
    require_finite(m, "eig_hermitian");
    const double defect = hermiticity_defect(m);
    if (defect > kHermitianTol) {
        throw std::invalid_argument(fmt::format(
            "eig_hermitian: input not Hermitian (defect {:.3e} > {:.1e})", defect,
            kHermitianTol));
    }
    const ComplexMatrix h = 0.5 * (m + m.adjoint());

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eig_hermitian: eigensolver failed to converge");
    }

    const Eigen::Index n = h.rows();
    HermitianDecomposition out;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }

    // Canonicalize cluster by cluster.
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && out.eigenvalues[end - 1] - out.eigenvalues[end] < kDegeneracyGap) {
            ++end;
        }
        const int size = static_cast<int>(end - start);
        if (size == 1) {
            canonicalize_phase(out.eigenvectors.col(start));
        } else {
            ComplexMatrix proj = ComplexMatrix::Zero(n, n);
            for (Eigen::Index i = start; i < end; ++i) {
                proj += out.eigenvectors.col(i) * out.eigenvectors.col(i).adjoint();
            }
            auto basis = canonical_subspace_basis(proj, size);
            if (std::ssize(basis) == size) {
                for (Eigen::Index i = start; i < end; ++i) {
                    out.eigenvectors.col(i) = basis[static_cast<std::size_t>(i - start)];
                }
            } else {
                // Projection picked up too few independent directions; keep the
                // solver's vectors, phase-fixed.
                for (Eigen::Index i = start; i < end; ++i) {
                    canonicalize_phase(out.eigenvectors.col(i));
                }
            }
        }
        start = end;
    }
    return out;
}

SvdResult svd(const ComplexMatrix& m) {
    require_finite(m, "svd");
    Eigen::JacobiSVD<ComplexMatrix> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SvdResult out;
    out.u = solver.matrixU();
    out.singular_values = solver.singularValues();
    out.v = solver.matrixV();
    for (Eigen::Index k = 0; k < out.u.cols(); ++k) {
        Eigen::Index pivot = 0;
        double best = 0.0;
        for (Eigen::Index i = 0; i < out.u.rows(); ++i) {
            const double a = std::abs(out.u(i, k));
            if (a > best) {
                best = a;
                pivot = i;
            }
        }
        if (best <= 0.0) continue;
        const Complex phase = std::conj(out.u(pivot, k)) / best;
        out.u.col(k) *= phase;
        out.v.col(k) *= phase;  // keeps u diag(s) v^dagger unchanged
    }
    return out;
}

}  // namespace qmeas
