#include <cmath>

#include <benchmark/benchmark.h>

#include "ptinv/auxode.hpp"
#include "ptinv/dyson.hpp"
#include "ptinv/invariants.hpp"
#include "ptinv/pointtrans.hpp"

using namespace ptinv;

namespace {

PointTransformSpec variable_mass() {
    PointTransformSpec p;
    p.target.kind = TargetKind::SwansonVariableMass;
    p.target.Omega = expr::Expr::parse("1 + 0.1*sin(t)");
    p.target.alpha_r = expr::Expr::parse("0.1 + 0.02*cos(t)");
    p.r = -1.5;
    p.s = 0.7;
    return p;
}

void BM_PinneySigma(benchmark::State& state) {
    PinneySpec spec;
    spec.kappa = [](double t) { return cplx(4.0 + std::sin(t)); };
    for (auto _ : state) benchmark::DoNotOptimize(pinney_sigma(spec, {0.0, 10.0}));
}
BENCHMARK(BM_PinneySigma)->Unit(benchmark::kMicrosecond);

void BM_SolveAux(benchmark::State& state) {
    const ConstraintSet cs(variable_mass());
    const AuxInitial ics{1.0, 0.0, 0.1, 0.0};
    for (auto _ : state) benchmark::DoNotOptimize(solve_aux(cs, ics, {0.0, 10.0}));
}
BENCHMARK(BM_SolveAux)->Unit(benchmark::kMillisecond);

// Invariant, Dyson map and Hermitian counterparts on a 201-point grid.
void BM_InvariantAndDyson(benchmark::State& state) {
    const ConstraintSet cs(variable_mass());
    const AuxTrajectory aux = solve_aux(cs, {1.0, 0.0, 0.1, 0.0}, {0.0, 10.0});
    std::vector<double> grid(201);
    for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = 0.05 * k;
    const OperatorAlgebra alg;
    for (auto _ : state) {
        InvariantTrajectory tr = build_invariant_trajectory(aux, grid);
        std::vector<GroupElement> eta;
        std::vector<AlgebraElement> H;
        for (double t : grid) {
            eta.push_back(solve_closed_form(aux, t));
            H.push_back(hamiltonian_at(aux, t));
        }
        benchmark::DoNotOptimize(hermitian_counterparts(eta, tr.I, H, alg));
    }
}
BENCHMARK(BM_InvariantAndDyson)->Unit(benchmark::kMillisecond);

void BM_GenericNewton(benchmark::State& state) {
    const ConstraintSet cs(variable_mass());
    const AuxTrajectory aux = solve_aux(cs, {1.0, 0.0, 0.1, 0.0}, {0.0, 10.0});
    std::vector<double> grid(201);
    for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = 0.05 * k;
    const InvariantTrajectory tr = build_invariant_trajectory(aux, grid);
    const OperatorAlgebra alg;
    for (auto _ : state) benchmark::DoNotOptimize(solve_generic(tr.I, tr.dI, {Basis::X2}, {}, alg));
}
BENCHMARK(BM_GenericNewton)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
