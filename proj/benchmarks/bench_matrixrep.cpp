#include <benchmark/benchmark.h>

#include "ptinv/dyson.hpp"
#include "ptinv/matrixrep.hpp"

using namespace ptinv;

namespace {

// Swanson-like element with a small non-Hermitian {x,p} part.
AlgebraElement swanson(double alpha) {
    AlgebraElement h;
    h = h.with(Basis::P2, 0.5).with(Basis::X2, 0.5).with(Basis::XP, cplx(0.0, alpha));
    return h;
}

MatrixBasis basis(std::size_t N) { return {N, N / 4, 1.0, 1.0, 1.0}; }

void BM_Materialize(benchmark::State& state) {
    const MatrixBasis mb = basis(static_cast<std::size_t>(state.range(0)));
    const AlgebraElement h = swanson(0.1);
    for (auto _ : state) benchmark::DoNotOptimize(materialize(h, mb));
}
BENCHMARK(BM_Materialize)->Arg(64)->Arg(128)->Arg(256);

void BM_MetricSpectrum(benchmark::State& state) {
    const GroupExponentiator ex(basis(static_cast<std::size_t>(state.range(0))));
    const GroupElement rho = metric(GroupElement({GroupFactor(Basis::X2, -0.1)}));
    for (auto _ : state) benchmark::DoNotOptimize(metric_spectrum(rho, ex));
}
BENCHMARK(BM_MetricSpectrum)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

// Crank-Nicolson over [0, 1] at dt = 1e-3 with the intertwining check at 11 points.
void BM_Propagate(benchmark::State& state) {
    const MatrixBasis mb = basis(static_cast<std::size_t>(state.range(0)));
    const ElementPath H = [](double) { return swanson(0.1); };
    const GroupPath eta = [](double) { return GroupElement({GroupFactor(Basis::X2, -0.1, 0.0)}); };
    std::vector<double> grid(11);
    for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = 0.1 * k;
    const StateVector phi0 = fock_state(0, mb);
    for (auto _ : state) benchmark::DoNotOptimize(propagate_check(H, eta, phi0, grid, mb));
}
BENCHMARK(BM_Propagate)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
