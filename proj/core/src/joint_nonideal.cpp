#include "qmeas/joint_nonideal.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qmeas {

namespace {

constexpr double kFeasibleResidual = 1e-8;
constexpr double kGradientTol = 1e-12;
constexpr int kMaxIterations = 100000;

// Euclidean projection onto the probability simplex {x >= 0, sum x = 1}.
void project_simplex(Eigen::Ref<Eigen::VectorXd> v) {
    const Eigen::Index n = v.size();
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());
    double running = 0.0;
    double tau = 0.0;
    int support = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        running += u[static_cast<std::size_t>(j)];
        const double candidate = (running - 1.0) / static_cast<double>(j + 1);
        if (u[static_cast<std::size_t>(j)] - candidate > 0.0) {
            tau = candidate;
            support = static_cast<int>(j + 1);
        }
    }
    (void)support;
    for (Eigen::Index i = 0; i < n; ++i) v[i] = std::max(0.0, v[i] - tau);
}

void project_columns(RealMatrix& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) project_simplex(m.col(c));
}

double direct_residual(const RealMatrix& lambda, const DiscretePOVM& observed,
                       const DiscretePOVM& ideal) {
    double f = 0.0;
    for (std::size_t m = 0; m < observed.size(); ++m) {
        ComplexMatrix r = observed.effects[m];
        for (std::size_t a = 0; a < ideal.size(); ++a) {
            r -= lambda(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(a)) *
                 ideal.effects[a];
        }
        f += r.squaredNorm();
    }
    return std::sqrt(std::max(0.0, f));
}

// Minimum-norm point of {lambda >= 0, unit column sums, G lambda_row = d_row}
// by Dykstra's alternating projections started from the origin.
RealMatrix dykstra_min_norm(const RealMatrix& gram, const RealMatrix& optimal,
                            int n_obs, int n_ideal) {
    const Eigen::Index vars = static_cast<Eigen::Index>(n_obs) * n_ideal;
    const Eigen::Index n_rows = n_ideal + static_cast<Eigen::Index>(n_obs) * n_ideal;
    RealMatrix a = RealMatrix::Zero(n_rows, vars);
    Eigen::VectorXd c(n_rows);
    // vec index of lambda(m, col) is m + n_obs*col (column-major).
    for (int col = 0; col < n_ideal; ++col) {
        for (int m = 0; m < n_obs; ++m) a(col, m + n_obs * col) = 1.0;
        c[col] = 1.0;
    }
    Eigen::Index row = n_ideal;
    for (int m = 0; m < n_obs; ++m) {
        const Eigen::VectorXd d = gram * optimal.row(m).transpose();
        for (int b = 0; b < n_ideal; ++b, ++row) {
            for (int acol = 0; acol < n_ideal; ++acol) {
                a(row, m + n_obs * acol) = gram(b, acol);
            }
            c[row] = d[b];
        }
    }
    Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(a);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(vars);
    Eigen::VectorXd correction = Eigen::VectorXd::Zero(vars);
    for (int it = 0; it < kMaxIterations; ++it) {
        const Eigen::VectorXd y = x - cod.solve(a * x - c);  // affine projection
        const Eigen::VectorXd w = y + correction;
        const Eigen::VectorXd x_new = w.cwiseMax(0.0);
        correction = w - x_new;
        const double delta = (x_new - x).norm();
        x = x_new;
        if (delta < 1e-13) break;
    }
    return Eigen::Map<const RealMatrix>(x.data(), n_obs, n_ideal);
}

}  // namespace

BivariatePOVM make_bivariate_povm(std::vector<std::string> row_labels,
                                  std::vector<std::string> col_labels,
                                  std::vector<std::vector<ComplexMatrix>> effects) {
    if (effects.empty() || effects[0].empty()) {
        throw std::invalid_argument("make_bivariate_povm: empty grid");
    }
    if (row_labels.size() != effects.size() || col_labels.size() != effects[0].size()) {
        throw std::invalid_argument("make_bivariate_povm: label/grid shape mismatch");
    }
    const Eigen::Index d = effects[0][0].rows();
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (const auto& grid_row : effects) {
        if (grid_row.size() != effects[0].size()) {
            throw std::invalid_argument("make_bivariate_povm: ragged grid");
        }
        for (const auto& e : grid_row) {
            if (e.rows() != d || e.cols() != d || !all_finite(e)) {
                throw std::invalid_argument("make_bivariate_povm: bad effect matrix");
            }
            if (hermiticity_defect(e) > kHermitianTol) {
                throw std::invalid_argument("make_bivariate_povm: effect not Hermitian");
            }
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> s(e, Eigen::EigenvaluesOnly);
            if (s.eigenvalues().minCoeff() < -1e-10) {
                throw std::invalid_argument(fmt::format(
                    "make_bivariate_povm: effect eigenvalue {:.3e} < 0",
                    s.eigenvalues().minCoeff()));
            }
            sum += e;
        }
    }
    if ((sum - ComplexMatrix::Identity(d, d)).norm() > kHermitianTol) {
        throw std::invalid_argument("make_bivariate_povm: grid does not sum to identity");
    }
    return BivariatePOVM{std::move(row_labels), std::move(col_labels), std::move(effects)};
}

MarginalPair marginals(const BivariatePOVM& r) {
    const Eigen::Index d = r.dim();
    std::vector<ComplexMatrix> row_effects(r.rows(), ComplexMatrix::Zero(d, d));
    std::vector<ComplexMatrix> col_effects(r.cols(), ComplexMatrix::Zero(d, d));
    for (std::size_t m = 0; m < r.rows(); ++m) {
        for (std::size_t n = 0; n < r.cols(); ++n) {
            row_effects[m] += r.effects[m][n];
            col_effects[n] += r.effects[m][n];
        }
    }
    return MarginalPair{make_povm(r.row_labels, std::move(row_effects)),
                        make_povm(r.col_labels, std::move(col_effects))};
}

NonidealitySolution solve_nonideality(const DiscretePOVM& observed, const DiscretePOVM& ideal) {
    if (observed.dim() != ideal.dim()) {
        throw std::invalid_argument(fmt::format(
            "solve_nonideality: observed dim {} vs ideal dim {}", observed.dim(), ideal.dim()));
    }
    const int n_obs = static_cast<int>(observed.size());
    const int n_ideal = static_cast<int>(ideal.size());

    RealMatrix gram(n_ideal, n_ideal);
    for (int a = 0; a < n_ideal; ++a) {
        for (int b = a; b < n_ideal; ++b) {
            gram(a, b) = gram(b, a) = (ideal.effects[static_cast<std::size_t>(a)] *
                                       ideal.effects[static_cast<std::size_t>(b)])
                                          .trace()
                                          .real();
        }
    }
    RealMatrix target(n_obs, n_ideal);
    for (int m = 0; m < n_obs; ++m) {
        for (int a = 0; a < n_ideal; ++a) {
            target(m, a) = (observed.effects[static_cast<std::size_t>(m)] *
                            ideal.effects[static_cast<std::size_t>(a)])
                               .trace()
                               .real();
        }
    }

    Eigen::SelfAdjointEigenSolver<RealMatrix> gram_eig(gram, Eigen::EigenvaluesOnly);
    const double top = gram_eig.eigenvalues().maxCoeff();
    if (!(top > 0.0)) {
        throw std::invalid_argument("solve_nonideality: degenerate ideal POVM");
    }
    const int rank = static_cast<int>(
        (gram_eig.eigenvalues().array() > 1e-10 * top).count());
    const double lipschitz = 2.0 * top;

    const auto gradient = [&](const RealMatrix& l) -> RealMatrix {
        return 2.0 * (l * gram - target);
    };

    // FISTA from the uniform matrix with gradient-mapping restarts.
    RealMatrix x = RealMatrix::Constant(n_obs, n_ideal, 1.0 / n_obs);
    RealMatrix y = x;
    double momentum = 1.0;
    for (int it = 0; it < kMaxIterations; ++it) {
        RealMatrix x_new = y - gradient(y) / lipschitz;
        project_columns(x_new);
        const double pg_norm = lipschitz * (x_new - y).norm();
        // gradient-mapping restart: drop momentum when it points uphill
        const bool restart = ((y - x_new).cwiseProduct(x_new - x)).sum() > 0.0;
        double coeff = 0.0;
        if (restart) {
            momentum = 1.0;
        } else {
            const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
            coeff = (momentum - 1.0) / next;
            momentum = next;
        }
        y = x_new + coeff * (x_new - x);
        const bool stalled = (x_new - x).norm() == 0.0;
        x = std::move(x_new);
        if (pg_norm <= kGradientTol || stalled) break;
    }

    NonidealitySolution out;
    out.unique = (rank == n_ideal);
    if (!out.unique) {
        x = dykstra_min_norm(gram, x, n_obs, n_ideal);
    }
    out.lambda = std::move(x);
    out.residual = direct_residual(out.lambda, observed, ideal);
    out.feasible = out.residual < kFeasibleResidual;
    return out;
}

double entropy_nonideality(const RealMatrix& lambda) {
    const Eigen::Index n_rows = lambda.rows();
    if (n_rows == 0) throw std::invalid_argument("entropy_nonideality: empty matrix");
    if ((lambda.array() < -1e-12).any()) {
        throw std::invalid_argument("entropy_nonideality: negative entries");
    }
    double total = 0.0;
    for (Eigen::Index m = 0; m < n_rows; ++m) {
        const double row_sum = lambda.row(m).sum();
        if (row_sum <= 0.0) continue;
        for (Eigen::Index a = 0; a < lambda.cols(); ++a) {
            const double v = lambda(m, a);
            if (v <= 0.0) continue;
            total -= v * std::log(v / row_sum);
        }
    }
    return total / static_cast<double>(n_rows);
}

double martens_bound(const DiscretePVM& p, const DiscretePVM& q) {
    if (p.dim() != q.dim()) {
        throw std::invalid_argument("martens_bound: dimension mismatch");
    }
    double max_overlap = 0.0;
    for (const auto& pm : p.projectors) {
        for (const auto& qn : q.projectors) {
            max_overlap = std::max(max_overlap, (pm * qn).trace().real());
        }
    }
    if (max_overlap <= 0.0) {
        throw std::runtime_error("martens_bound: degenerate projector overlap");
    }
    return -std::log(max_overlap);
}

MartensReport verify_martens(const BivariatePOVM& r, const DiscretePVM& p,
                             const DiscretePVM& q) {
    const MarginalPair margin = marginals(r);
    const NonidealitySolution lambda = solve_nonideality(margin.row, as_povm(p));
    if (!lambda.feasible) {
        throw std::runtime_error(fmt::format(
            "verify_martens: row marginal is not a nonideal version of p (residual {:.3e})",
            lambda.residual));
    }
    const NonidealitySolution mu = solve_nonideality(margin.col, as_povm(q));
    if (!mu.feasible) {
        throw std::runtime_error(fmt::format(
            "verify_martens: column marginal is not a nonideal version of q (residual {:.3e})",
            mu.residual));
    }
    MartensReport report;
    report.j_lambda = entropy_nonideality(lambda.lambda);
    report.j_mu = entropy_nonideality(mu.lambda);
    report.bound = martens_bound(p, q);
    report.satisfied = report.j_lambda + report.j_mu >= report.bound - 1e-9;
    return report;
}

}  // namespace qmeas
