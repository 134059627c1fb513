#include "qmeas/epr.hpp"
#include "qmeas/joint_nonideal.hpp"
#include "qmeas/linalg.hpp"
#include "qmeas/observables.hpp"
#include "qmeas/subquantum.hpp"

#include "support/random_qm.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

using namespace qmeas;
using namespace qmeas::testing;

namespace {

void BM_EigHermitian(benchmark::State& state) {
    Xoshiro256 rng(1);
    const ComplexMatrix h = random_hermitian(rng, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(eig_hermitian(h));
    }
}
BENCHMARK(BM_EigHermitian)->Arg(4)->Arg(16)->Arg(64);

void BM_Svd(benchmark::State& state) {
    Xoshiro256 rng(2);
    const ComplexMatrix m =
        random_matrix(rng, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(svd(m));
    }
}
BENCHMARK(BM_Svd)->Arg(4)->Arg(16)->Arg(64);

void BM_TensorProduct(benchmark::State& state) {
    Xoshiro256 rng(3);
    const int n = static_cast<int>(state.range(0));
    const ComplexMatrix a = random_matrix(rng, n, n);
    const ComplexMatrix b = random_matrix(rng, n, n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(tensor_product(a, b));
    }
}
BENCHMARK(BM_TensorProduct)->Arg(4)->Arg(16);

void BM_PartialTrace(benchmark::State& state) {
    Xoshiro256 rng(4);
    const int d = static_cast<int>(state.range(0));
    const ComplexMatrix m = random_matrix(rng, d * d, d * d);
    for (auto _ : state) {
        benchmark::DoNotOptimize(partial_trace(m, {d, d}, Subsystem::first));
    }
}
BENCHMARK(BM_PartialTrace)->Arg(2)->Arg(8);

void BM_CompilePovm(benchmark::State& state) {
    Xoshiro256 rng(5);
    const int d = static_cast<int>(state.range(0));
    const MeasurementModel model{random_density(rng, d), random_unitary(rng, 2 * d),
                                 random_rank1_pvm(rng, d)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(compile_povm(model, 2));
    }
}
BENCHMARK(BM_CompilePovm)->Arg(2)->Arg(4);

void BM_SolveNonideality(benchmark::State& state) {
    const double gamma = 1.0 / std::sqrt(2.0);
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    const DiscretePOVM observed =
        make_povm({"+", "-"}, {0.5 * (id + gamma * pauli_z()), 0.5 * (id - gamma * pauli_z())});
    const DiscretePOVM ideal = as_povm(spin_pvm(0.0, "z"));
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_nonideality(observed, ideal));
    }
}
BENCHMARK(BM_SolveNonideality);

void BM_JointDistributionLp(benchmark::State& state) {
    const double c = 1.0 / std::sqrt(2.0);
    const CorrelationTable table = quantum_correlation_table(
        singlet(), spin_pvm(0.0, "a1"), spin_pvm(std::numbers::pi / 2, "b1"),
        spin_pvm(std::numbers::pi / 4, "a2"), spin_pvm(3 * std::numbers::pi / 4, "b2"));
    benchmark::DoNotOptimize(c);
    for (auto _ : state) {
        benchmark::DoNotOptimize(joint_distribution_exists(table));
    }
}
BENCHMARK(BM_JointDistributionLp);

void BM_TrajectoryMonteCarlo(benchmark::State& state) {
    const auto axis = [](double a) { return Eigen::Vector3d(std::sin(a), 0, std::cos(a)); };
    const TrajectoryModel model = make_contextual_reference_model(
        {{"A1", axis(0.0)}, {"B1", axis(std::numbers::pi / 2)}},
        {{"A2", axis(std::numbers::pi / 4)}, {"B2", axis(3 * std::numbers::pi / 4)}});
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            trajectory_correlation(model, {"A1", "B1", "A2", "B2"}, n, ++seed));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * 4));
}
BENCHMARK(BM_TrajectoryMonteCarlo)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
