#include "qmeas/linalg.hpp"

#include "support/random_qm.hpp"

#include <doctest.h>

using namespace qmeas;
using namespace qmeas::testing;

namespace {

ComplexMatrix identity(int n) { return ComplexMatrix::Identity(n, n); }

}  // namespace

TEST_CASE("tensor_product: identity case") {
    CHECK((tensor_product(identity(2), identity(2)) - identity(4)).norm() == 0.0);
}

TEST_CASE("tensor_product: sigma_z x sigma_z diagonal") {
    // hand-expanded 4x4 Kronecker product
    const ComplexMatrix zz = tensor_product(pauli_z(), pauli_z());
    ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
    expected(0, 0) = 1;
    expected(1, 1) = -1;
    expected(2, 2) = -1;
    expected(3, 3) = 1;
    CHECK((zz - expected).norm() == 0.0);
}

TEST_CASE("tensor_product: block layout of (2x2) x (3x3)") {
    Xoshiro256 rng(1);
    const ComplexMatrix a = random_matrix(rng, 2, 2);
    const ComplexMatrix b = random_matrix(rng, 3, 3);
    const ComplexMatrix t = tensor_product(a, b);
    REQUIRE(t.rows() == 6);
    REQUIRE(t.cols() == 6);
    CHECK((t.block(0, 0, 3, 3) - a(0, 0) * b).norm() == 0.0);
    CHECK((t.block(3, 3, 3, 3) - a(1, 1) * b).norm() == 0.0);
}

TEST_CASE("tensor_product: associativity on integer matrices") {
    ComplexMatrix a(2, 2), b(2, 2), c(2, 2);
    a << Complex(1), Complex(2), Complex(3), Complex(4);
    b << Complex(0), Complex(-1), Complex(5), Complex(2);
    c << Complex(7), Complex(1), Complex(-3), Complex(2);
    const ComplexMatrix left = tensor_product(tensor_product(a, b), c);
    const ComplexMatrix right = tensor_product(a, tensor_product(b, c));
    CHECK((left - right).norm() == 0.0);
}

TEST_CASE("tensor_product: rejects factors beyond the dimension cap") {
    const ComplexMatrix big = ComplexMatrix::Identity(65, 65);
    CHECK_THROWS_AS(tensor_product(big, identity(2)), std::invalid_argument);
}

TEST_CASE("partial_trace: product state factorizes") {
    Xoshiro256 rng(2);
    const ComplexMatrix rho1 = random_density(rng, 2).matrix();
    const ComplexMatrix rho2 = random_density(rng, 3).matrix();
    const ComplexMatrix joint = tensor_product(rho1, rho2);
    CHECK((partial_trace(joint, {2, 3}, Subsystem::first) - rho1).norm() < 1e-14);
    CHECK((partial_trace(joint, {2, 3}, Subsystem::second) - rho2).norm() < 1e-14);
}

TEST_CASE("partial_trace: singlet reduces to the maximally mixed state") {
    // expand the singlet projector and sum the 2x2 blocks by hand:
    // rho = (|01><01| - |01><10| - |10><01| + |10><10|)/2, both partial
    // traces pick up (|0><0| + |1><1|)/2.
    const ComplexMatrix rho = singlet().amplitudes() * singlet().amplitudes().adjoint();
    CHECK((partial_trace(rho, {2, 2}, Subsystem::second) - 0.5 * identity(2)).norm() < 1e-14);
    CHECK((partial_trace(rho, {2, 2}, Subsystem::first) - 0.5 * identity(2)).norm() < 1e-14);
}

TEST_CASE("partial_trace: maximally mixed 4x4") {
    CHECK((partial_trace(0.25 * identity(4), {2, 2}, Subsystem::second) - 0.5 * identity(2))
              .norm() < 1e-15);
}

TEST_CASE("partial_trace: linear and trace preserving on random input") {
    Xoshiro256 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix m = random_matrix(rng, 6, 6);
        const ComplexMatrix n = random_matrix(rng, 6, 6);
        const Complex alpha(rng.normal(), rng.normal());
        const ComplexMatrix lin = partial_trace(m + alpha * n, {2, 3}, Subsystem::first);
        const ComplexMatrix sep = partial_trace(m, {2, 3}, Subsystem::first) +
                                  alpha * partial_trace(n, {2, 3}, Subsystem::first);
        CHECK((lin - sep).norm() < 1e-12);
        CHECK(std::abs(partial_trace(m, {2, 3}, Subsystem::second).trace() - m.trace()) <
              1e-12);
    }
}

TEST_CASE("partial_trace: rejects dims mismatch") {
    CHECK_THROWS_AS(partial_trace(identity(4), {2, 3}, Subsystem::first),
                    std::invalid_argument);
}

TEST_CASE("eig_hermitian: sigma_z is already diagonal") {
    const HermitianDecomposition dec = eig_hermitian(pauli_z());
    CHECK(dec.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(dec.eigenvalues[1] == doctest::Approx(-1.0));
    CHECK(std::abs(dec.eigenvectors(0, 0) - Complex(1)) < 1e-12);
    CHECK(std::abs(dec.eigenvectors(1, 1) - Complex(1)) < 1e-12);
}

TEST_CASE("eig_hermitian: sigma_x eigenvectors follow the phase convention") {
    // characteristic polynomial gives eigenvalues +-1 with (1,+-1)/sqrt(2)
    const HermitianDecomposition dec = eig_hermitian(pauli_x());
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(dec.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(dec.eigenvalues[1] == doctest::Approx(-1.0));
    CHECK(std::abs(dec.eigenvectors(0, 0) - Complex(s)) < 1e-12);
    CHECK(std::abs(dec.eigenvectors(1, 0) - Complex(s)) < 1e-12);
    CHECK(std::abs(dec.eigenvectors(0, 1) - Complex(s)) < 1e-12);
    CHECK(std::abs(dec.eigenvectors(1, 1) - Complex(-s)) < 1e-12);
}

TEST_CASE("eig_hermitian: degenerate identity keeps the standard basis") {
    const HermitianDecomposition dec = eig_hermitian(identity(3));
    CHECK((dec.eigenvectors - identity(3)).norm() < 1e-12);
    for (int i = 0; i < 3; ++i) CHECK(dec.eigenvalues[i] == doctest::Approx(1.0));
}

TEST_CASE("eig_hermitian: reconstruction on random Hermitian matrices") {
    Xoshiro256 rng(4);
    for (const int n : {2, 3, 5, 8, 16}) {
        const ComplexMatrix h = random_hermitian(rng, n);
        const HermitianDecomposition dec = eig_hermitian(h);
        const ComplexMatrix rebuilt = dec.eigenvectors *
                                      dec.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
                                      dec.eigenvectors.adjoint();
        CHECK((rebuilt - h).norm() < 1e-10);
        CHECK((dec.eigenvectors.adjoint() * dec.eigenvectors - identity(n)).norm() < 1e-10);
        for (int i = 1; i < n; ++i) CHECK(dec.eigenvalues[i - 1] >= dec.eigenvalues[i]);
    }
}

TEST_CASE("eig_hermitian: deterministic output on a degenerate spectrum") {
    // projector onto a 2d subspace of C^4 -> eigenvalues (1,1,0,0)
    Xoshiro256 rng(5);
    const ComplexMatrix u = random_unitary(rng, 4);
    const ComplexMatrix proj = u.col(0) * u.col(0).adjoint() + u.col(1) * u.col(1).adjoint();
    const HermitianDecomposition first = eig_hermitian(proj);
    const HermitianDecomposition second = eig_hermitian(proj);
    CHECK((first.eigenvectors - second.eigenvectors).norm() == 0.0);
    const ComplexMatrix rebuilt =
        first.eigenvectors *
        first.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
        first.eigenvectors.adjoint();
    CHECK((rebuilt - proj).norm() < 1e-10);
}

TEST_CASE("eig_hermitian: rejects non-Hermitian input") {
    ComplexMatrix m(2, 2);
    m << Complex(0), Complex(1), Complex(0), Complex(0);
    CHECK_THROWS_AS(eig_hermitian(m), std::invalid_argument);
}

TEST_CASE("svd: diagonal input") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 3;
    m(1, 1) = 2;
    const SvdResult dec = svd(m);
    CHECK(dec.singular_values[0] == doctest::Approx(3.0));
    CHECK(dec.singular_values[1] == doctest::Approx(2.0));
}

TEST_CASE("svd: rank one outer product") {
    Xoshiro256 rng(6);
    ComplexVector u = random_matrix(rng, 3, 1);
    ComplexVector v = random_matrix(rng, 4, 1);
    u /= u.norm();
    v /= v.norm();
    const SvdResult dec = svd(u * v.adjoint());
    CHECK(dec.singular_values[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (Eigen::Index k = 1; k < dec.singular_values.size(); ++k) {
        CHECK(dec.singular_values[k] < 1e-12);
    }
}

TEST_CASE("svd: singlet coefficient matrix") {
    // c^dagger c = I/2, so both singular values are 1/sqrt(2)
    const double s = 1.0 / std::sqrt(2.0);
    ComplexMatrix c(2, 2);
    c << Complex(0), Complex(s), Complex(-s), Complex(0);
    const SvdResult dec = svd(c);
    CHECK(dec.singular_values[0] == doctest::Approx(s).epsilon(1e-12));
    CHECK(dec.singular_values[1] == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("svd: reconstruction and orthonormal factors") {
    Xoshiro256 rng(7);
    for (const auto& [r, c] : {std::pair{3, 3}, std::pair{4, 2}, std::pair{2, 5}}) {
        const ComplexMatrix m = random_matrix(rng, r, c);
        const SvdResult dec = svd(m);
        const ComplexMatrix rebuilt =
            dec.u * dec.singular_values.asDiagonal().toDenseMatrix().cast<Complex>() *
            dec.v.adjoint();
        CHECK((rebuilt - m).norm() < 1e-10);
        CHECK((dec.u.adjoint() * dec.u - identity(static_cast<int>(dec.u.cols()))).norm() <
              1e-12);
        CHECK((dec.v.adjoint() * dec.v - identity(static_cast<int>(dec.v.cols()))).norm() <
              1e-12);
    }
}

TEST_CASE("svd: singular values invariant under random unitaries") {
    Xoshiro256 rng(8);
    const ComplexMatrix m = random_matrix(rng, 4, 4);
    const RealVector s0 = svd(m).singular_values;
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix u = random_unitary(rng, 4);
        const ComplexMatrix v = random_unitary(rng, 4);
        const RealVector s1 = svd(u * m * v).singular_values;
        CHECK((s0 - s1).norm() < 1e-10);
    }
}
