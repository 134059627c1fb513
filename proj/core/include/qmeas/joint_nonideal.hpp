#pragma once

#include "qmeas/observables.hpp"

#include <string>
#include <vector>

namespace qmeas {

/// Outcome grid {R_mn} of a joint measurement: every effect positive, the
/// grid summing to the identity. Build through make_bivariate_povm.
struct BivariatePOVM {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<std::vector<ComplexMatrix>> effects;  // effects[m][n]

    std::size_t rows() const { return effects.size(); }
    std::size_t cols() const { return effects.empty() ? 0 : effects[0].size(); }
    int dim() const {
        return effects.empty() || effects[0].empty() ? 0
                                                     : static_cast<int>(effects[0][0].rows());
    }
};

BivariatePOVM make_bivariate_povm(std::vector<std::string> row_labels,
                                  std::vector<std::string> col_labels,
                                  std::vector<std::vector<ComplexMatrix>> effects);

struct MarginalPair {
    DiscretePOVM row;  // sum over columns
    DiscretePOVM col;  // sum over rows
};

/// Row and column marginals of the grid; both are POVMs by construction.
MarginalPair marginals(const BivariatePOVM& r);

/// Result of expanding an observed POVM over an ideal one:
///   observed_m ~ sum_m' lambda(m,m') ideal_m',
/// lambda entrywise nonnegative with unit column sums.
struct NonidealitySolution {
    bool feasible = false;
    RealMatrix lambda;      // rows: observed outcomes, cols: ideal outcomes
    double residual = 0.0;  // sqrt(sum_m ||observed_m - sum lambda ideal||_F^2)
    bool unique = true;     // false when the ideal effects are linearly dependent
};

/// Least-squares recovery of the nonideality matrix, posed as nonnegative
/// least squares with unit-column-sum constraints. Deterministic: projected
/// gradient (FISTA) from the uniform matrix, stopping at projected-gradient
/// norm 1e-12 or 1e5 iterations. Feasible means residual < 1e-8. When the
/// ideal effects are linearly dependent the minimizer is not unique; the
/// minimum-Frobenius-norm representative is returned and `unique` cleared.
NonidealitySolution solve_nonideality(const DiscretePOVM& observed, const DiscretePOVM& ideal);

/// Average row entropy (nats) of a nonnegative matrix:
///   J = -(1/N) sum_mm' lambda(m,m') ln[lambda(m,m') / rowsum_m],
/// N the number of rows, 0 ln 0 = 0. Zero exactly when every row has a
/// single nonzero entry.
double entropy_nonideality(const RealMatrix& lambda);

/// Entropic incompatibility bound -ln max_mn Tr(P_m Q_n) (nats). Any joint
/// nonideal measurement of p and q has J_lambda + J_mu at or above this.
/// Zero for compatible PVMs.
double martens_bound(const DiscretePVM& p, const DiscretePVM& q);

struct MartensReport {
    double j_lambda = 0.0;
    double j_mu = 0.0;
    double bound = 0.0;
    bool satisfied = false;
};

/// Checks the entropic trade-off for a joint measurement grid whose marginals
/// are nonideal versions of the PVMs p and q. Throws when either marginal
/// fails to decompose over its target. `satisfied` false indicates a broken
/// grid or an implementation bug, never valid physics.
MartensReport verify_martens(const BivariatePOVM& r, const DiscretePVM& p,
                             const DiscretePVM& q);

}  // namespace qmeas
