#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qmeas {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Largest supported dimension per subsystem factor. The toolkit targets
/// desk-scale systems; anything bigger is almost certainly a caller bug.
inline constexpr int kMaxSubsystemDim = 64;

/// Default tolerance for Hermiticity / reconstruction checks (Frobenius).
inline constexpr double kHermitianTol = 1e-10;

/// Eigenvalue gap below which adjacent eigenvalues are treated as one
/// degenerate cluster when canonicalizing eigenvectors.
inline constexpr double kDegeneracyGap = 1e-8;

/// Bipartite dimension split (d_first x d_second).
struct Dims {
    int first = 0;
    int second = 0;
    int total() const { return first * second; }
};

enum class Subsystem { first, second };

struct HermitianDecomposition {
    RealVector eigenvalues;   // sorted descending
    ComplexMatrix eigenvectors;  // orthonormal columns, canonical phases
};

struct SvdResult {
    ComplexMatrix u;              // orthonormal columns
    RealVector singular_values;   // descending, nonnegative
    ComplexMatrix v;              // orthonormal columns; m = u * diag(s) * v^dagger
};

/// True when every entry of m is finite.
bool all_finite(const ComplexMatrix& m);

/// Frobenius distance from Hermitian symmetry, ||m - m^dagger||_F.
double hermiticity_defect(const ComplexMatrix& m);

/// Kronecker product with block layout a(i,j) * b. Throws when a factor or
/// the product exceeds the supported dimension cap.
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Partial trace of a (dims.first * dims.second)-square matrix over the
/// discarded subsystem; the result acts on the kept one. Trace preserving.
ComplexMatrix partial_trace(const ComplexMatrix& m, Dims dims, Subsystem keep);

/// Eigendecomposition of a Hermitian matrix.
///
/// Output conventions (fixed so results reproduce across runs and platforms):
///   - eigenvalues descending;
///   - each eigenvector's largest-magnitude component (first such index on
///     ties) is made real and positive;
///   - inside a degenerate cluster (adjacent gap < kDegeneracyGap) the basis
///     is rebuilt by projecting the standard basis vectors onto the cluster
///     subspace in index order and orthonormalizing.
/// Inputs within kHermitianTol of Hermitian are symmetrized first; anything
/// farther away throws.
HermitianDecomposition eig_hermitian(const ComplexMatrix& m);

/// Singular value decomposition m = u diag(s) v^dagger with the same phase
/// canonicalization applied to the columns of u (compensated in v).
SvdResult svd(const ComplexMatrix& m);

}  // namespace qmeas
