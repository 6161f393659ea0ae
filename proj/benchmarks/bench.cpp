#include "bp/branch_points.hpp"
#include "bp/spectral.hpp"
#include "bp/sweep.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using bp::Complex;

Eigen::MatrixXcd random_symmetric(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const Complex z(gauss(rng), gauss(rng));
            m(i, j) = z;
            m(j, i) = z;
        }
    return m;
}

bp::FamilySpec two_level(double v) {
    bp::FamilySpec spec;
    spec.n = 2;
    spec.levels = {{1.0, -0.5, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0}};
    spec.coupling.mode = bp::CouplingMode::Uniform;
    spec.coupling.uniform_value = Complex(v, 0.0);
    return spec;
}

bp::FamilySpec four_level(double v) {
    bp::FamilySpec spec;
    spec.n = 4;
    spec.levels = {{1.0, -1.0 / 3.0, 0.0, 0.0},
                   {1.0, -5.0 / 12.0, 0.0, 0.0},
                   {1.0, -0.5, 0.0, 0.0},
                   {0.0, 1.0, 0.0, 0.0}};
    spec.coupling.mode = bp::CouplingMode::Uniform;
    spec.coupling.uniform_value = Complex(v, 0.0);
    return spec;
}

void BM_eigendecompose(benchmark::State& state) {
    std::mt19937_64 rng(42);
    const Eigen::MatrixXcd m = random_symmetric(static_cast<int>(state.range(0)), rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(bp::eigendecompose(m));
}
BENCHMARK(BM_eigendecompose)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_discriminant_4level(benchmark::State& state) {
    const bp::FamilySpec spec = four_level(0.03);
    for (auto _ : state)
        benchmark::DoNotOptimize(bp::discriminant(spec, Complex(0.7, 0.05)));
}
BENCHMARK(BM_discriminant_4level);

void BM_find_branch_point(benchmark::State& state) {
    const bp::FamilySpec spec = two_level(0.05);
    for (auto _ : state)
        benchmark::DoNotOptimize(bp::find_branch_point(spec, Complex(2.0 / 3.0, 0.1)));
}
BENCHMARK(BM_find_branch_point);

void BM_sweep_two_level(benchmark::State& state) {
    const bp::FamilySpec spec = two_level(0.05);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            bp::sweep(spec, 0.0, 4.0 / 3.0, static_cast<int>(state.range(0)), false));
}
BENCHMARK(BM_sweep_two_level)->Arg(100)->Arg(400);

} // namespace

BENCHMARK_MAIN();
