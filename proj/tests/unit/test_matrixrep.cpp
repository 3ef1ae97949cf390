#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "pairings.hpp"
#include "ptinv/dyson.hpp"
#include "ptinv/errors.hpp"
#include "ptinv/matrixrep.hpp"
#include "test_support.hpp"

using namespace ptinv;
using ptinv::testing::Pairing;
using ptinv::testing::real_pairings;

namespace {

MatrixBasis basis(std::size_t N, std::size_t trust, double m0 = 1.0, double w0 = 1.0, double hbar = 1.0) {
    MatrixBasis b;
    b.N = N;
    b.N_trust = trust;
    b.m0 = m0;
    b.omega0 = w0;
    b.hbar = hbar;
    return b;
}

AlgebraElement unit(Basis b) { return AlgebraElement::unit(b); }

// f(X) for the truncated position matrix of a large basis, via its eigenbasis.
// The leading block converges to the exact operator as the basis grows.
template <class F>
DenseOperator function_of_x(const MatrixBasis& big, F f) {
    const DenseOperator X = materialize(unit(Basis::X), big);
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(X);
    Eigen::VectorXcd d(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = f(es.eigenvalues()(i));
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

PropagationReport propagate(const Pairing& pr, double span, double dt, const MatrixBasis& mb) {
    auto aux = std::make_shared<AuxTrajectory>(solve_aux(ConstraintSet(pr.spec), pr.ics, {0.0, span}));
    std::vector<double> grid;
    for (int k = 0; k <= 10; ++k) grid.push_back(span * k / 10.0);
    PropagationOptions po;
    po.dt = dt;
    return propagate_check([aux](double t) { return hamiltonian_at(*aux, t); },
                           [aux](double t) { return solve_closed_form(*aux, t); }, fock_state(0, mb), grid, mb, po);
}

}  // namespace

TEST(Materialize, GroundStateMoments) {
    const MatrixBasis b = basis(16, 8);
    const StateVector g = fock_state(0, b);
    EXPECT_NEAR((g.adjoint() * materialize(unit(Basis::X2), b) * g)(0).real(), 0.5, 1e-15);
    EXPECT_NEAR((g.adjoint() * materialize(unit(Basis::P2), b) * g)(0).real(), 0.5, 1e-15);
    const MatrixBasis s = basis(16, 8, 2.0, 0.5, 0.7);
    // <n|x^2|n> = hbar/(2 m0 w0) (2n + 1)
    for (std::size_t n : {0u, 3u}) {
        const StateVector v = fock_state(n, s);
        EXPECT_NEAR((v.adjoint() * materialize(unit(Basis::X2), s) * v)(0).real(), 0.7 / 2.0 * (2 * n + 1), 1e-14);
        EXPECT_NEAR((v.adjoint() * materialize(unit(Basis::P2), s) * v)(0).real(), 0.7 / 2.0 * (2 * n + 1), 1e-14);
    }
    EXPECT_DOUBLE_EQ(s.length(), std::sqrt(0.7 / 2.0));
}

TEST(Materialize, IdentityAndLinearity) {
    const MatrixBasis b = basis(24, 12);
    EXPECT_EQ(max_abs(materialize(unit(Basis::One), b) - DenseOperator::Identity(24, 24)), 0.0);
    std::mt19937_64 rng(70);
    for (int k = 0; k < 20; ++k) {
        const AlgebraElement A = ptinv::testing::random_element(rng), B = ptinv::testing::random_element(rng);
        EXPECT_LT(max_abs(materialize(A + B, b) - materialize(A, b) - materialize(B, b)), 1e-13);
        // the band storage holds the same entries
        const BandOperator band = materialize_band(A, b);
        const DenseOperator D = materialize(A, b);
        for (Eigen::Index i = 0; i < 24; ++i)
            for (Eigen::Index k2 = 0; k2 < 5; ++k2) {
                const Eigen::Index j = i + k2 - 2;
                if (j >= 0 && j < 24) EXPECT_EQ(band(i, k2), D(i, j));
            }
    }
}

TEST(Materialize, QuadraticImagesAreProductsAwayFromTheEdge) {
    const MatrixBasis b = basis(40, 20, 1.3, 0.8, 0.9);
    const DenseOperator X = materialize(unit(Basis::X), b), P = materialize(unit(Basis::P), b);
    EXPECT_LT(max_abs(trusted_block(X * X - materialize(unit(Basis::X2), b), b)), 1e-13);
    EXPECT_LT(max_abs(trusted_block(P * P - materialize(unit(Basis::P2), b), b)), 1e-13);
    EXPECT_LT(max_abs(trusted_block(X * P + P * X - materialize(unit(Basis::XP), b), b)), 1e-13);
    // [x, p] = i hbar
    EXPECT_LT(max_abs(trusted_block(X * P - P * X - cplx(0, 0.9) * DenseOperator::Identity(40, 40), b)), 1e-13);
}

TEST(CommutatorCheck, RandomPairs) {
    const MatrixBasis b = basis(64, 32);
    std::mt19937_64 rng(71);
    for (int k = 0; k < 50; ++k) {
        const AlgebraElement A = ptinv::testing::random_element(rng), B = ptinv::testing::random_element(rng);
        EXPECT_LT(commutator_check(A, B, b), 1e-12);
        EXPECT_EQ(commutator_check(A, A, b), 0.0);
    }
    const MatrixBasis h = basis(64, 32, 1.0, 1.0, 0.37);
    const AlgebraElement A = ptinv::testing::random_element(rng), B = ptinv::testing::random_element(rng);
    EXPECT_LT(commutator_check(A, B, h), 1e-12);
}

TEST(MatrixBasis, Validation) {
    EXPECT_THROW(basis(4, 2).validate(), PreconditionError);
    EXPECT_THROW(basis(32, 20).validate(), PreconditionError);
    EXPECT_THROW(basis(32, 16, 0.0).validate(), PreconditionError);
    EXPECT_NO_THROW(basis(32, 16).validate());
}

TEST(GroupExponentiator, MatchesSpectralExponentialOfX) {
    const MatrixBasis b = basis(64, 16), big = basis(400, 16);
    const GroupExponentiator ex(b);
    for (double th : {-0.7, 0.4}) {
        const DenseOperator want = function_of_x(big, [th](double x) { return std::exp(th * x); }).topLeftCorner(16, 16);
        const DenseOperator got = trusted_block(ex(GroupElement({GroupFactor(Basis::X, th)})), b);
        EXPECT_LT(max_abs(got - want), 1e-10) << th;
    }
    const DenseOperator want = function_of_x(big, [](double x) { return std::exp(-0.2 * x * x); }).topLeftCorner(16, 16);
    EXPECT_LT(max_abs(trusted_block(ex(GroupElement({GroupFactor(Basis::X2, -0.2)})), b) - want), 1e-10);
}

TEST(GroupExponentiator, ConjugationMatchesAdjointAction) {
    // Real-parameter factors are unbounded operators in general; these stay well inside
    // what the truncated basis resolves on the trusted block.
    const MatrixBasis b = basis(128, 24);
    const GroupExponentiator ex(b);
    const OperatorAlgebra alg;
    const std::vector<GroupElement> groups{
        GroupElement({GroupFactor(Basis::X, 0.3), GroupFactor(Basis::P, -0.2), GroupFactor(Basis::X2, -0.1)}),
        GroupElement({GroupFactor(Basis::P, 0.2), GroupFactor(Basis::X, 0.1)}),
        GroupElement({GroupFactor(Basis::XP, 0.05)}),
        GroupElement({GroupFactor(Basis::P2, -0.1), GroupFactor(Basis::X, 0.2)}),
    };
    std::mt19937_64 rng(72);
    for (const GroupElement& g : groups) {
        const AlgebraElement B = ptinv::testing::random_element(rng);
        const DenseOperator lhs = ex(g) * materialize(B, b) * ex(g.inverse());
        const DenseOperator rhs = materialize(alg.adjoint_action(g, B), b);
        EXPECT_LT(max_abs(trusted_block(lhs - rhs, b)) / std::max(1.0, max_abs(trusted_block(rhs, b))), 1e-9);
        EXPECT_LT(max_abs(trusted_block(ex(g) * ex(g.inverse()), b) - DenseOperator::Identity(24, 24)), 1e-9);
    }
}

TEST(GroupExponentiator, RejectsComplexAndHugeParameters) {
    const MatrixBasis b = basis(32, 16);
    const GroupExponentiator ex(b);
    EXPECT_THROW(ex.check(GroupElement({GroupFactor(Basis::X2, cplx(0.1, 0.1))})), PreconditionError);
    EXPECT_THROW(ex.check(GroupElement({GroupFactor(Basis::X2, 1e4)})), TruncationOverflow);
    EXPECT_NO_THROW(ex.check(GroupElement({GroupFactor(Basis::X2, 0.1)})));
}

TEST(MetricSpectrum, Examples) {
    const MatrixBasis b = basis(32, 16);
    EXPECT_NEAR(metric_spectrum(GroupElement(), b), 1.0, 1e-14);
    const double v = metric_spectrum(metric(GroupElement({GroupFactor(Basis::X2, -0.1)})), b);
    EXPECT_GT(v, 0.0);
    // against the spectral exponential: min eig of P exp(-0.2 x^2) P
    const DenseOperator rho = function_of_x(basis(400, 16), [](double x) { return std::exp(-0.2 * x * x); });
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(rho.topLeftCorner(16, 16));
    EXPECT_NEAR(v, es.eigenvalues().minCoeff(), 1e-9 * es.eigenvalues().maxCoeff());
    EXPECT_THROW(metric_spectrum(metric(GroupElement({GroupFactor(Basis::X2, -10.0)})), b), TruncationOverflow);
}

TEST(MetricSpectrum, PositiveForClosedFormMaps) {
    const MatrixBasis b = basis(128, 32);
    const GroupExponentiator ex(b);
    for (const Pairing& pr : real_pairings()) {
        auto aux = solve_aux(ConstraintSet(pr.spec), pr.ics, {0.0, 5.0});
        for (double t : {0.0, 2.5, 5.0}) EXPECT_GT(metric_spectrum(metric(solve_closed_form(aux, t)), ex), 0.0) << pr.name;
    }
}

TEST(MatrixLr, AgreesWithCoefficientResidual) {
    const MatrixBasis b = basis(64, 32);
    const OperatorAlgebra alg;
    for (const Pairing& pr : real_pairings()) {
        auto aux = solve_aux(ConstraintSet(pr.spec), pr.ics, {0.0, 5.0});
        for (double t : {0.5, 2.5, 4.5}) {
            const AuxPoint q = aux.at(t);
            const AlgebraElement I = build_invariant(pr.spec, q), dI = invariant_rate(pr.spec, q);
            const AlgebraElement H = hamiltonian_at(aux, t);
            const DenseOperator Rm = matrix_lr_residual(I, dI, H, b);
            const DenseOperator Rc = trusted_block(materialize(lr_residual_element(I, dI, H, alg), b), b);
            EXPECT_LT(max_abs(Rm - Rc), 1e-8) << pr.name;
            // a wrong invariant rate shows up at both levels alike
            const AlgebraElement bad = dI + AlgebraElement::unit(Basis::X2, 1e-3);
            EXPECT_GT(max_abs(matrix_lr_residual(I, bad, H, b)), 1e-4);
        }
    }
}

TEST(Propagation, HermitianControlConservesNorm) {
    Pairing pr = real_pairings().back();
    pr.spec.reference.b = pr.spec.target.b = 0.0;
    const PropagationReport r = propagate(pr, 3.0, 1e-3, basis(64, 32));
    EXPECT_LT(r.plain_norm_drift_H, 1e-10);
    EXPECT_LT(r.metric_norm_drift, 1e-10);
    EXPECT_LT(r.intertwining_final, 1e-10);
    EXPECT_EQ(r.times.size(), 11u);
}

TEST(Propagation, ComplexLinearConservesMetricNormOnly) {
    const PropagationReport r = propagate(real_pairings().back(), 3.0, 1e-3, basis(64, 32));
    EXPECT_LT(r.metric_norm_drift, 1e-6);
    EXPECT_GT(r.plain_norm_drift_H, 1e-3);
    EXPECT_LT(r.intertwining_final, 1e-5);
    EXPECT_LT(r.plain_norm_drift_h, 1e-8);
}

TEST(Propagation, SwansonConservesMetricNorm) {
    const PropagationReport r = propagate(real_pairings()[1], 3.0, 1e-3, basis(64, 32));
    EXPECT_LT(r.metric_norm_drift, 1e-6);
    EXPECT_GT(r.plain_norm_drift_H, 1e-3);
    EXPECT_LT(r.intertwining_final, 1e-5);
}

TEST(Propagation, SecondOrderInTheStep) {
    const Pairing pr = real_pairings().back();
    const double e1 = propagate(pr, 2.0, 4e-3, basis(64, 32)).intertwining_final;
    const double e2 = propagate(pr, 2.0, 2e-3, basis(64, 32)).intertwining_final;
    EXPECT_GT(e1 / e2, 3.5);
    EXPECT_LT(e1 / e2, 4.5);
}

TEST(Propagation, LeakRaisesTruncationOverflow) {
    // a strong squeezer pushes the ground state out of a small basis
    const MatrixBasis b = basis(16, 8);
    const AlgebraElement H = AlgebraElement::unit(Basis::XP, 2.0);
    EXPECT_THROW(propagate_check([H](double) { return H; }, [](double) { return GroupElement(); }, fock_state(0, b),
                                 {0.0, 3.0}, b),
                 TruncationOverflow);
}

TEST(Propagation, Preconditions) {
    const MatrixBasis b = basis(16, 8);
    const AlgebraElement H = AlgebraElement(AlgebraElement::Coeffs{0.5, 0, 0, 0.5, 0, 0});
    auto Hp = [H](double) { return H; };
    auto id = [](double) { return GroupElement(); };
    EXPECT_THROW(propagate_check(Hp, id, fock_state(12, b), {0.0, 1.0}, b), PreconditionError);
    EXPECT_THROW(propagate_check(Hp, id, fock_state(0, b), {1.0, 0.0}, b), PreconditionError);
    // the oscillator ground state only picks up a phase
    const PropagationReport r = propagate_check(Hp, id, fock_state(0, b), {0.0, 1.0}, b);
    EXPECT_LT(r.plain_norm_drift_H, 1e-12);
    EXPECT_LT(r.max_leak, 1e-20);
}
