#include "qmeas/observables.hpp"

#include "qmeas/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qmeas {

namespace {

void check_operator_family(const std::vector<std::string>& labels,
                           const std::vector<ComplexMatrix>& ops, const char* what) {
    if (ops.empty()) throw std::invalid_argument(fmt::format("{}: no outcomes", what));
    if (labels.size() != ops.size()) {
        throw std::invalid_argument(fmt::format("{}: {} labels for {} operators", what,
                                                labels.size(), ops.size()));
    }
    const Eigen::Index d = ops[0].rows();
    for (const auto& op : ops) {
        if (op.rows() != d || op.cols() != d) {
            throw std::invalid_argument(fmt::format("{}: inconsistent dimensions", what));
        }
        if (!all_finite(op)) {
            throw std::invalid_argument(fmt::format("{}: non-finite entries", what));
        }
        if (hermiticity_defect(op) > kHermitianTol) {
            throw std::invalid_argument(fmt::format("{}: effect not Hermitian", what));
        }
    }
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (const auto& op : ops) sum += op;
    if ((sum - ComplexMatrix::Identity(d, d)).norm() > kHermitianTol) {
        throw std::invalid_argument(fmt::format("{}: operators do not sum to identity", what));
    }
}

double min_eigenvalue(const ComplexMatrix& h) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> s(h, Eigen::EigenvaluesOnly);
    return s.eigenvalues().minCoeff();
}

std::pair<double, double> eigenvalue_range(const ComplexMatrix& h) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> s(h, Eigen::EigenvaluesOnly);
    return {s.eigenvalues().minCoeff(), s.eigenvalues().maxCoeff()};
}

}  // namespace

DiscretePVM make_pvm(std::vector<std::string> labels, std::vector<ComplexMatrix> projectors) {
    check_operator_family(labels, projectors, "make_pvm");
    for (std::size_t i = 0; i < projectors.size(); ++i) {
        if ((projectors[i] * projectors[i] - projectors[i]).norm() > kHermitianTol) {
            throw std::invalid_argument(
                fmt::format("make_pvm: projector '{}' not idempotent", labels[i]));
        }
        for (std::size_t j = i + 1; j < projectors.size(); ++j) {
            if ((projectors[i] * projectors[j]).norm() > kHermitianTol) {
                throw std::invalid_argument(fmt::format(
                    "make_pvm: projectors '{}' and '{}' not orthogonal", labels[i], labels[j]));
            }
        }
    }
    return DiscretePVM{std::move(labels), std::move(projectors)};
}

DiscretePOVM make_povm(std::vector<std::string> labels, std::vector<ComplexMatrix> effects) {
    check_operator_family(labels, effects, "make_povm");
    for (std::size_t i = 0; i < effects.size(); ++i) {
        const auto [lo, hi] = eigenvalue_range(effects[i]);
        if (lo < -1e-10 || hi > 1.0 + 1e-10) {
            throw std::invalid_argument(fmt::format(
                "make_povm: effect '{}' spectrum [{:.3e}, {:.3e}] outside [0,1]",
                labels[i], lo, hi));
        }
    }
    return DiscretePOVM{std::move(labels), std::move(effects)};
}

DiscretePOVM as_povm(const DiscretePVM& pvm) {
    return DiscretePOVM{pvm.labels, pvm.projectors};
}

std::vector<double> probabilities(const DensityOperator& rho, const DiscretePOVM& povm) {
    if (rho.dim() != povm.dim()) {
        throw std::invalid_argument(fmt::format(
            "probabilities: state dim {} vs POVM dim {}", rho.dim(), povm.dim()));
    }
    std::vector<double> p(povm.size());
    for (std::size_t m = 0; m < povm.size(); ++m) {
        const double value = (rho.matrix() * povm.effects[m]).trace().real();
        if (value < -1e-10 || value > 1.0 + 1e-10) {
            throw std::runtime_error(fmt::format(
                "probabilities: p[{}] = {:.3e} outside [0,1] tolerance", m, value));
        }
        p[m] = std::clamp(value, 0.0, 1.0);
    }
    return p;
}

OutcomeSequence sample(const DensityOperator& rho, const DiscretePOVM& povm,
                       std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
    const std::vector<double> p = probabilities(rho, povm);
    std::vector<double> cdf(p.size());
    double acc = 0.0;
    for (std::size_t m = 0; m < p.size(); ++m) {
        acc += p[m];
        cdf[m] = acc;
    }
    cdf.back() = 1.0;

    Xoshiro256 rng(seed);
    OutcomeSequence seq;
    seq.values.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double u = rng.uniform();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        seq.values[t] = static_cast<int>(std::distance(cdf.begin(), it));
    }
    return seq;
}

DiscretePOVM compile_povm(const MeasurementModel& model, int object_dim) {
    const int apparatus_dim = model.apparatus_initial.dim();
    if (object_dim <= 0 || object_dim > kMaxSubsystemDim) {
        throw std::invalid_argument("compile_povm: bad object dimension");
    }
    const Eigen::Index total = static_cast<Eigen::Index>(object_dim) * apparatus_dim;
    if (model.interaction.rows() != total || model.interaction.cols() != total) {
        throw std::invalid_argument(fmt::format(
            "compile_povm: interaction is {}x{}, expected {}x{}", model.interaction.rows(),
            model.interaction.cols(), total, total));
    }
    if (model.pointer_pvm.dim() != apparatus_dim) {
        throw std::invalid_argument("compile_povm: pointer PVM must act on the apparatus");
    }
    const ComplexMatrix& u = model.interaction;
    if ((u.adjoint() * u - ComplexMatrix::Identity(total, total)).norm() > kHermitianTol) {
        throw std::invalid_argument("compile_povm: interaction is not unitary");
    }

    const ComplexMatrix id_o = ComplexMatrix::Identity(object_dim, object_dim);
    const ComplexMatrix weighted =
        tensor_product(id_o, model.apparatus_initial.matrix());
    const Dims dims{object_dim, apparatus_dim};

    std::vector<ComplexMatrix> effects;
    effects.reserve(model.pointer_pvm.size());
    for (const auto& pointer : model.pointer_pvm.projectors) {
        const ComplexMatrix propagated = u.adjoint() * tensor_product(id_o, pointer) * u;
        ComplexMatrix effect = partial_trace(weighted * propagated, dims, Subsystem::first);
        effect = 0.5 * (effect + effect.adjoint().eval());
        const double lo = min_eigenvalue(effect);
        if (lo < -1e-10) {
            throw std::runtime_error(fmt::format(
                "compile_povm: effect has negative eigenvalue {:.3e}; model is inconsistent",
                lo));
        }
        effects.push_back(std::move(effect));
    }
    return make_povm(model.pointer_pvm.labels, std::move(effects));
}

UncertaintyProduct uncertainty_product(const DensityOperator& rho, const ComplexMatrix& a,
                                       const ComplexMatrix& b) {
    if (a.rows() != rho.dim() || b.rows() != rho.dim() || a.rows() != a.cols() ||
        b.rows() != b.cols()) {
        throw std::invalid_argument("uncertainty_product: dimension mismatch");
    }
    if (hermiticity_defect(a) > kHermitianTol || hermiticity_defect(b) > kHermitianTol) {
        throw std::invalid_argument("uncertainty_product: observables must be Hermitian");
    }
    const auto variance = [&rho](const ComplexMatrix& op) {
        const double mean = (rho.matrix() * op).trace().real();
        const double second = (rho.matrix() * op * op).trace().real();
        return std::max(0.0, second - mean * mean);
    };
    UncertaintyProduct out;
    out.delta_a = std::sqrt(variance(a));
    out.delta_b = std::sqrt(variance(b));
    const Complex comm_mean = ((a * b - b * a) * rho.matrix()).trace();
    out.bound = 0.5 * std::abs(comm_mean);
    return out;
}

bool is_compatible(const DiscretePOVM& p, const DiscretePOVM& q) {
    if (p.dim() != q.dim()) {
        throw std::invalid_argument("is_compatible: dimension mismatch");
    }
    for (const auto& ep : p.effects) {
        for (const auto& eq : q.effects) {
            if ((ep * eq - eq * ep).norm() > kHermitianTol) return false;
        }
    }
    return true;
}

}  // namespace qmeas
