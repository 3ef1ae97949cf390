#include <random>

#include <benchmark/benchmark.h>

#include "ptinv/algebra.hpp"
#include "ptinv/exprparse.hpp"

using namespace ptinv;

namespace {

AlgebraElement random_element(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    AlgebraElement::Coeffs c;
    for (auto& z : c) z = cplx(u(rng), u(rng));
    return AlgebraElement(c);
}

void BM_Commutator(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const OperatorAlgebra alg;
    const AlgebraElement a = random_element(rng), b = random_element(rng);
    for (auto _ : state) benchmark::DoNotOptimize(alg.commutator(a, b));
}
BENCHMARK(BM_Commutator);

// Conjugation through a product of `range(0)` one-parameter factors.
void BM_AdjointAction(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    std::vector<GroupFactor> f;
    for (int k = 0; k < state.range(0); ++k) f.emplace_back(static_cast<Basis>(k % 5), u(rng));
    const GroupElement g(std::move(f));
    const OperatorAlgebra alg;
    const AlgebraElement b = random_element(rng);
    for (auto _ : state) benchmark::DoNotOptimize(alg.adjoint_action(g, b));
}
BENCHMARK(BM_AdjointAction)->Arg(1)->Arg(2)->Arg(5);

void BM_ExprParse(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(expr::Expr::parse("0.1 + 0.02*cos(t) * exp(-t/5)"));
}
BENCHMARK(BM_ExprParse);

void BM_ExprJet2(benchmark::State& state) {
    const auto e = expr::Expr::parse("0.1 + 0.02*cos(t) * exp(-t/5)");
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(e.eval_jet2(t));
        t += 1e-3;
    }
}
BENCHMARK(BM_ExprJet2);

}  // namespace

BENCHMARK_MAIN();
