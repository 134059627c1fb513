#include "qmeas/epr.hpp"

#include "support/random_qm.hpp"

#include <doctest.h>

#include <numbers>

using namespace qmeas;
using namespace qmeas::testing;

namespace {

DiscretePVM sigma_z_pvm() { return spin_pvm(0.0, "z"); }
DiscretePVM sigma_x_pvm() { return spin_pvm(std::numbers::pi / 2, "x"); }

StateVector product_state(Xoshiro256& rng, int d1, int d2, int i, int j) {
    ComplexVector v = ComplexVector::Zero(d1 * d2);
    (void)rng;
    v[i * d2 + j] = 1.0;
    return StateVector(std::move(v));
}

}  // namespace

TEST_CASE("joint_probability: sharp product state") {
    Xoshiro256 rng(51);
    const EPRScenario s{product_state(rng, 2, 2, 0, 1), sigma_z_pvm(), sigma_z_pvm()};
    const RealMatrix grid = joint_probability(s);
    CHECK(grid(0, 1) == doctest::Approx(1.0));
    CHECK(grid.sum() == doctest::Approx(1.0));
    CHECK(grid(0, 0) + grid(1, 0) + grid(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("joint_probability: singlet in matching bases is anti-diagonal") {
    const EPRScenario s{singlet(), sigma_z_pvm(), sigma_z_pvm()};
    const RealMatrix grid = joint_probability(s);
    CHECK(grid(0, 0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(grid(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(grid(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(grid(1, 1) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("joint_probability: singlet across mutually unbiased bases is uniform") {
    const EPRScenario s{singlet(), sigma_z_pvm(), sigma_x_pvm()};
    const RealMatrix grid = joint_probability(s);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(grid(i, j) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("conditional_probability: singlet row") {
    const EPRScenario s{singlet(), sigma_z_pvm(), sigma_z_pvm()};
    const auto cond = conditional_probability(joint_probability(s), 0);
    CHECK(cond[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cond[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("conditional_probability: independent grid reproduces the column law") {
    RealMatrix grid(2, 2);
    grid << 0.12, 0.28, 0.18, 0.42;  // rows proportional to (0.3, 0.7)
    const auto c0 = conditional_probability(grid, 0);
    const auto c1 = conditional_probability(grid, 1);
    CHECK(c0[0] == doctest::Approx(0.3));
    CHECK(c0[1] == doctest::Approx(0.7));
    CHECK(c1[0] == doctest::Approx(c0[0]));
    CHECK(c1[1] == doctest::Approx(c0[1]));
}

TEST_CASE("conditional_probability: conditioning on probability zero throws") {
    RealMatrix grid(2, 2);
    grid << 0.5, 0.5, 0.0, 0.0;
    CHECK_THROWS_AS(conditional_probability(grid, 1), std::invalid_argument);
}

TEST_CASE("conditionally_prepared_state: singlet prepares the flipped spin") {
    const DensityOperator rho = conditionally_prepared_state(singlet(), sigma_z_pvm(), 0);
    CHECK(std::abs(rho.matrix()(1, 1) - Complex(1)) < 1e-12);
    CHECK(std::abs(rho.matrix()(0, 0)) < 1e-12);
}

TEST_CASE("conditionally_prepared_state: Schmidt basis PVM prepares the partner vector") {
    Xoshiro256 rng(52);
    for (const auto& [d1, d2] : {std::pair{2, 2}, std::pair{2, 3}, std::pair{3, 4}}) {
        const StateVector psi = random_state(rng, d1 * d2);
        const SchmidtForm form = schmidt_decompose(psi, {d1, d2});
        REQUIRE(form.rank() == d1);  // random states have full Schmidt rank

        std::vector<std::string> labels;
        std::vector<ComplexMatrix> projectors;
        for (int i = 0; i < d1; ++i) {
            labels.push_back("s" + std::to_string(i));
            projectors.push_back(form.left_basis[static_cast<std::size_t>(i)] *
                                 form.left_basis[static_cast<std::size_t>(i)].adjoint());
        }
        const DiscretePVM schmidt_pvm = make_pvm(std::move(labels), std::move(projectors));
        for (int i = 0; i < d1; ++i) {
            const DensityOperator prepared =
                conditionally_prepared_state(psi, schmidt_pvm, i);
            const ComplexMatrix expected =
                form.right_basis[static_cast<std::size_t>(i)] *
                form.right_basis[static_cast<std::size_t>(i)].adjoint();
            CHECK((prepared.matrix() - expected).norm() < 1e-10);
        }
    }
}

TEST_CASE("conditionally_prepared_state: product state is untouched") {
    Xoshiro256 rng(53);
    const StateVector a = random_state(rng, 2);
    const StateVector b = random_state(rng, 3);
    ComplexVector prod(6);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) prod[i * 3 + j] = a.amplitudes()[i] * b.amplitudes()[j];
    const StateVector psi(std::move(prod));
    const ComplexMatrix expected = b.amplitudes() * b.amplitudes().adjoint();
    const DiscretePVM z = sigma_z_pvm();
    for (int outcome = 0; outcome < 2; ++outcome) {
        const double p = std::norm(a.amplitudes()[outcome]);
        if (p < 1e-10) continue;
        const DensityOperator prepared = conditionally_prepared_state(psi, z, outcome);
        CHECK((prepared.matrix() - expected).norm() < 1e-9);
    }
}

TEST_CASE("conditionally_prepared_state: degenerate projector gives the mixed state "
          "reproducing every conditional law") {
    Xoshiro256 rng(61);
    // first observable on C^3 with a rank-2 outcome
    const DiscretePVM fine = random_rank1_pvm(rng, 3);
    const ComplexMatrix coarse0 = fine.projectors[0] + fine.projectors[1];
    const DiscretePVM coarse = make_pvm({"01", "2"}, {coarse0, fine.projectors[2]});

    const StateVector psi = random_state(rng, 3 * 2);
    const DensityOperator prepared = conditionally_prepared_state(psi, coarse, 0);
    // genuinely mixed in general
    CHECK((prepared.matrix() * prepared.matrix() - prepared.matrix()).norm() > 1e-6);

    // the prepared state must reproduce p(f|a) for arbitrary second
    // observables, computed independently from the joint grid
    for (int trial = 0; trial < 5; ++trial) {
        const DiscretePVM f2 = random_rank1_pvm(rng, 2);
        const EPRScenario scenario{psi, coarse, f2};
        const auto conditional = conditional_probability(joint_probability(scenario), 0);
        const auto direct = probabilities(prepared, as_povm(f2));
        for (std::size_t j = 0; j < direct.size(); ++j) {
            CHECK(direct[j] == doctest::Approx(conditional[j]).epsilon(1e-10));
        }
    }
}

TEST_CASE("conditionally_prepared_state: zero-probability outcome throws") {
    Xoshiro256 rng(54);
    const StateVector psi = product_state(rng, 2, 2, 0, 0);
    CHECK_THROWS_AS(conditionally_prepared_state(psi, sigma_z_pvm(), 1),
                    std::invalid_argument);
}

TEST_CASE("conditional preparation partitions the unconditional ensemble") {
    Xoshiro256 rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        const int d1 = 2 + static_cast<int>(rng.uniform_int(2));
        const int d2 = 2 + static_cast<int>(rng.uniform_int(3));
        const StateVector psi = random_state(rng, d1 * d2);
        const DiscretePVM pvm = random_rank1_pvm(rng, d1);
        const EPRScenario s{psi, pvm, random_rank1_pvm(rng, d2)};
        const RealMatrix grid = joint_probability(s);

        ComplexMatrix mixture = ComplexMatrix::Zero(d2, d2);
        for (int i = 0; i < d1; ++i) {
            const double p = grid.row(i).sum();
            if (p < 1e-12) continue;
            mixture += p * conditionally_prepared_state(psi, pvm, i).matrix();
        }
        const ComplexMatrix rho2 =
            reduce(density_from_pure(psi), {d1, d2}, Subsystem::second).matrix();
        CHECK((mixture - rho2).norm() < 1e-10);
    }
}

TEST_CASE("contextual_state: commuting state is unchanged") {
    // diagonal rho in the sigma_z context
    ComplexMatrix diag = ComplexMatrix::Zero(2, 2);
    diag(0, 0) = 0.3;
    diag(1, 1) = 0.7;
    const DensityOperator rho(std::move(diag));
    const DensityOperator out = contextual_state(rho, sigma_z_pvm());
    CHECK((out.matrix() - rho.matrix()).norm() < 1e-14);
}

TEST_CASE("contextual_state: overlap-weighted projector mixture") {
    Xoshiro256 rng(56);
    const StateVector beta = random_state(rng, 3);
    const DiscretePVM pvm = random_rank1_pvm(rng, 3);
    const DensityOperator out = contextual_state(density_from_pure(beta), pvm);
    ComplexMatrix expected = ComplexMatrix::Zero(3, 3);
    for (const auto& proj : pvm.projectors) {
        const double weight = (proj * beta.amplitudes() * beta.amplitudes().adjoint())
                                  .trace()
                                  .real();
        expected += weight * proj;
    }
    CHECK((out.matrix() - expected).norm() < 1e-12);
}

TEST_CASE("contextual_state: |+> in the sigma_z context is maximally mixed") {
    ComplexVector plus(2);
    plus << Complex(1 / std::sqrt(2.0)), Complex(1 / std::sqrt(2.0));
    const DensityOperator out =
        contextual_state(density_from_pure(StateVector(std::move(plus))), sigma_z_pvm());
    CHECK((out.matrix() - 0.5 * ComplexMatrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("contextual_state: idempotent and probability preserving") {
    Xoshiro256 rng(57);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_int(3));
        const DensityOperator rho = random_density(rng, n);
        const DiscretePVM pvm = random_rank1_pvm(rng, n);
        const DensityOperator once = contextual_state(rho, pvm);
        const DensityOperator twice = contextual_state(once, pvm);
        CHECK((once.matrix() - twice.matrix()).norm() < 1e-12);
        CHECK(std::abs(once.matrix().trace().real() - 1.0) < 1e-12);
        for (const auto& proj : pvm.projectors) {
            const double before = (rho.matrix() * proj).trace().real();
            const double after = (once.matrix() * proj).trace().real();
            CHECK(std::abs(before - after) < 1e-12);
        }
        // commutes with every projector
        for (const auto& proj : pvm.projectors) {
            CHECK((once.matrix() * proj - proj * once.matrix()).norm() < 1e-10);
        }
    }
}

TEST_CASE("two_particle_contextual_state: product state in matching bases") {
    Xoshiro256 rng(58);
    const StateVector psi = product_state(rng, 2, 2, 1, 0);
    const DensityOperator out =
        two_particle_contextual_state(psi, sigma_z_pvm(), sigma_z_pvm());
    CHECK((out.matrix() - density_from_pure(psi).matrix()).norm() < 1e-12);
}

TEST_CASE("two_particle_contextual_state: singlet in z-contexts") {
    const DensityOperator out =
        two_particle_contextual_state(singlet(), sigma_z_pvm(), sigma_z_pvm());
    ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
    expected(1, 1) = 0.5;  // |01><01|
    expected(2, 2) = 0.5;  // |10><10|
    CHECK((out.matrix() - expected).norm() < 1e-12);
}

TEST_CASE("two_particle_contextual_state: partial traces give local contextual states") {
    Xoshiro256 rng(59);
    for (int trial = 0; trial < 20; ++trial) {
        const int d1 = 2 + static_cast<int>(rng.uniform_int(2));
        const int d2 = 2 + static_cast<int>(rng.uniform_int(2));
        const StateVector psi = random_state(rng, d1 * d2);
        const DiscretePVM a = random_rank1_pvm(rng, d1);
        const DiscretePVM b = random_rank1_pvm(rng, d2);
        const DensityOperator joint = two_particle_contextual_state(psi, a, b);
        const DensityOperator rho = density_from_pure(psi);

        const ComplexMatrix left = reduce(joint, {d1, d2}, Subsystem::first).matrix();
        const ComplexMatrix left_expected =
            contextual_state(reduce(rho, {d1, d2}, Subsystem::first), a).matrix();
        CHECK((left - left_expected).norm() < 1e-10);

        const ComplexMatrix right = reduce(joint, {d1, d2}, Subsystem::second).matrix();
        const ComplexMatrix right_expected =
            contextual_state(reduce(rho, {d1, d2}, Subsystem::second), b).matrix();
        CHECK((right - right_expected).norm() < 1e-10);
    }
}

TEST_CASE("locality of contexts: wing-2 contextual state ignores the wing-1 PVM") {
    Xoshiro256 rng(60);
    for (int trial = 0; trial < 20; ++trial) {
        const StateVector psi = random_state(rng, 4);
        const DiscretePVM b = random_rank1_pvm(rng, 2);
        const DiscretePVM a1 = random_rank1_pvm(rng, 2);
        const DiscretePVM a2 = random_rank1_pvm(rng, 2);
        const ComplexMatrix with_a1 =
            reduce(two_particle_contextual_state(psi, a1, b), {2, 2}, Subsystem::second)
                .matrix();
        const ComplexMatrix with_a2 =
            reduce(two_particle_contextual_state(psi, a2, b), {2, 2}, Subsystem::second)
                .matrix();
        CHECK((with_a1 - with_a2).norm() < 1e-10);
    }
}
