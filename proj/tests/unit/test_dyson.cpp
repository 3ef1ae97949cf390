#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pairings.hpp"
#include "ptinv/dyson.hpp"
#include "ptinv/errors.hpp"
#include "test_support.hpp"

using namespace ptinv;
using ptinv::testing::Pairing;
using ptinv::testing::base_spec;
using ptinv::testing::real_pairings;
using ptinv::testing::rel_to;

namespace {

std::vector<Pairing> swanson_pairings() {
    auto all = real_pairings();
    all.pop_back();
    return all;
}

Pairing complex_linear() { return real_pairings().back(); }

std::vector<double> sample_grid() {
    std::vector<double> g;
    for (double t = 0.0; t <= 5.0 + 1e-12; t += 0.25) g.push_back(t);
    return g;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(ClosedForm, SwansonThetaHermitizesInvariant) {
    const OperatorAlgebra alg;
    for (const Pairing& pr : swanson_pairings()) {
        auto aux = solve_aux(ConstraintSet(pr.spec), pr.ics, {0.0, 5.0});
        for (double t : sample_grid()) {
            const AuxPoint q = aux.at(t);
            const GroupElement eta = solve_closed_form(aux, t);
            ASSERT_EQ(eta.factors().size(), 1u);
            EXPECT_EQ(eta.factors()[0].generator, Basis::X2);
            const double theta = eta.factors()[0].parameter.real();
            EXPECT_NEAR(theta, -q.alpha_r.real() * pr.spec.reference.m * std::pow(q.sigma.real(), pr.spec.n()), 1e-14);
            const AlgebraElement I = build_invariant(aux, t);
            const AlgebraElement Ih = alg.adjoint_action(eta, I);
            EXPECT_LT(Ih.hermiticity_defect() / std::max(1.0, Ih.max_abs()), 1e-10) << pr.name;
            // x^2 coefficient picks up 4 m^2 a_r alpha_r^2 sigma^(-2r-4s) on top of d_r
            const double shift = swanson_Ih_x2_shift(pr.spec, q);
            EXPECT_NEAR(shift,
                        2 * pr.spec.reference.m * std::pow(q.alpha_r.real(), 2) *
                            std::pow(q.sigma.real(), -2 * pr.spec.r - 2 * pr.spec.s),
                        1e-12);
            EXPECT_LT(rel(Ih[Basis::X2].real(), canonical_split(I).d_r + shift), 1e-8) << pr.name;
            // the coefficient route agrees with the sigma route
            EXPECT_LT(rel(swanson_theta_from_coeffs(canonical_split(I), 1.0), theta), 1e-9) << pr.name;
        }
    }
}

TEST(ClosedForm, ThetaScalesWithInverseHbar) {
    Pairing pr = swanson_pairings()[1];
    auto aux1 = solve_aux(ConstraintSet(pr.spec), pr.ics, {0.0, 2.0});
    pr.spec.hbar = 0.5;
    auto aux2 = solve_aux(ConstraintSet(pr.spec), pr.ics, {0.0, 2.0});
    const double t1 = solve_closed_form(aux1, 1.0).factors()[0].parameter.real();
    const double t2 = solve_closed_form(aux2, 1.0).factors()[0].parameter.real();
    EXPECT_NEAR(t2, 2.0 * t1, 1e-12);
    EXPECT_LT(rel(swanson_theta_from_coeffs(canonical_split(build_invariant(aux2, 1.0)), 0.5), t2), 1e-9);
}

TEST(ClosedForm, MatchedAlphaGivesConstantTheta) {
    // alpha_r = sigma^(r+2s) makes theta = -m/hbar for all t
    auto p = base_spec(ReferenceKind::HarmonicOscillator, TargetKind::SwansonVariableMass, -1.5, 0.7);
    p.reference.m = p.target.m = 1.3;
    p.target.alpha_r_form = AlphaRForm::SigmaPower;
    p.target.c2 = 1.0;
    p.target.alpha_power = p.r + 2 * p.s;
    auto aux = solve_aux(ConstraintSet(p), {1.0, 0.1, 0.1, 0.0}, {0.0, 3.0});
    for (double t = 0.0; t <= 3.0; t += 0.25) {
        const GroupFactor f = solve_closed_form(aux, t).factors()[0];
        EXPECT_NEAR(f.parameter.real(), -1.3, 1e-13);
        EXPECT_NEAR(f.rate->real(), 0.0, 1e-12);
    }
}

TEST(ClosedForm, ComplexLinearParameters) {
    const Pairing pr = complex_linear();
    auto aux = solve_aux(ConstraintSet(pr.spec), pr.ics, {0.0, 5.0});
    const double m = pr.spec.reference.m, w2 = std::pow(pr.spec.reference.omega, 2), b = pr.spec.reference.b;
    const double r = pr.spec.r, s = pr.spec.s;
    const OperatorAlgebra alg;
    for (double t : sample_grid()) {
        const AuxPoint q = aux.at(t);
        const double sg = q.sigma.real(), st = q.sigma_t.real();
        const GroupElement eta = solve_closed_form(aux, t);
        ASSERT_EQ(eta.factors().size(), 2u);
        EXPECT_EQ(eta.factors()[0].generator, Basis::P);
        EXPECT_EQ(eta.factors()[1].generator, Basis::X);
        const double eps = eta.factors()[0].parameter.real(), lam = eta.factors()[1].parameter.real();
        EXPECT_NEAR(eps, b * std::pow(sg, s) / (m * w2), 1e-14);
        EXPECT_NEAR(lam, -b * s * std::pow(sg, -1 - r - s) * st / w2, 1e-14);

        const AlgebraElement I = build_invariant(aux, t);
        const CanonicalCoeffs c = canonical_split(I);
        const LinearDysonParams lp = complex_linear_from_coeffs(c, 1.0);
        EXPECT_LT(rel(lp.epsilon, eps), 1e-9);
        EXPECT_LT(rel(lp.lambda, lam), 1e-9);
        EXPECT_LT(complex_linear_identity_defect(c), 1e-9);
        EXPECT_LT(alg.adjoint_action(eta, I).hermiticity_defect(), 1e-10);
    }
}

TEST(ClosedForm, ComplexLinearWithZeroCouplingIsIdentity) {
    Pairing pr = complex_linear();
    pr.spec.reference.b = pr.spec.target.b = 0.0;
    auto aux = solve_aux(ConstraintSet(pr.spec), pr.ics, {0.0, 2.0});
    EXPECT_TRUE(solve_closed_form(aux, 1.0).simplified().empty());
    EXPECT_TRUE(metric(solve_closed_form(aux, 1.0)).empty());
}

TEST(ClosedForm, Preconditions) {
    Pairing cl = complex_linear();
    auto aux = solve_aux(ConstraintSet(cl.spec), cl.ics, {0.0, 1.0});
    auto spec = cl.spec;
    spec.reference.omega = 0.0;
    EXPECT_THROW(solve_closed_form(spec, aux.at(0.5)), PreconditionError);

    Pairing sw = swanson_pairings()[1];
    auto aux2 = solve_aux(ConstraintSet(sw.spec), sw.ics, {0.0, 1.0});
    AuxPoint q = aux2.at(0.5);
    q.alpha_r = 0.0;
    EXPECT_THROW(solve_closed_form(sw.spec, q), PreconditionError);
}

TEST(GenericNewton, ReproducesClosedForms) {
    const OperatorAlgebra alg;
    for (const Pairing& pr : real_pairings()) {
        const bool cl = pr.spec.target.kind == TargetKind::ComplexLinear;
        const std::vector<Basis> family = cl ? std::vector<Basis>{Basis::P, Basis::X} : std::vector<Basis>{Basis::X2};
        auto aux = solve_aux(ConstraintSet(pr.spec), pr.ics, {0.0, 5.0});
        const auto grid = sample_grid();
        const auto tr = build_invariant_trajectory(aux, grid);
        const auto res = solve_generic(tr.I, tr.dI, family, {}, alg);
        ASSERT_EQ(res.size(), grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const GroupElement eta = solve_closed_form(aux, grid[k]);
            for (std::size_t j = 0; j < family.size(); ++j) {
                const GroupFactor& f = eta.factors()[j];
                EXPECT_LT(rel(res[k].params[j], f.parameter.real()), 1e-8) << pr.name << " t = " << grid[k];
                EXPECT_LT(rel(res[k].rates[j], f.rate->real()), 1e-8) << pr.name << " rate, t = " << grid[k];
            }
            EXPECT_LT(res[k].defect, 1e-12);
        }
    }
}

TEST(GenericNewton, HermitianInputNeedsNoIterations) {
    const AlgebraElement H(AlgebraElement::Coeffs{0.5, 0, 0, 0.5, 0.1, 0});
    const NewtonResult r = solve_generic_one(H, {Basis::X2}, {0.0}, OperatorAlgebra());
    EXPECT_EQ(r.iterations, 0);
    EXPECT_EQ(r.params[0], 0.0);
}

TEST(GenericNewton, BadInputs) {
    const OperatorAlgebra alg;
    const AlgebraElement I = build_invariant(
        solve_aux(ConstraintSet(swanson_pairings()[0].spec), swanson_pairings()[0].ics, {0.0, 1.0}), 0.5);
    EXPECT_THROW(solve_generic_one(I, {}, {}, alg), PreconditionError);
    EXPECT_THROW(solve_generic_one(I, {Basis::X2}, {0.0, 1.0}, alg), PreconditionError);
    // a p-shift cannot remove an imaginary {x,p} coefficient
    EXPECT_THROW(solve_generic_one(I, {Basis::P}, {0.0}, alg), ConvergenceError);
    EXPECT_THROW(solve_generic({I, I}, {I}, {Basis::X2}, {}, alg), PreconditionError);
}

TEST(Counterparts, HermitianHamiltonianMatchesClosedForm) {
    const OperatorAlgebra alg;
    for (const Pairing& pr : real_pairings()) {
        auto aux = solve_aux(ConstraintSet(pr.spec), pr.ics, {0.0, 5.0});
        const auto grid = sample_grid();
        const auto tr = build_invariant_trajectory(aux, grid);
        std::vector<GroupElement> eta;
        std::vector<AlgebraElement> H;
        for (double t : grid) {
            eta.push_back(solve_closed_form(aux, t));
            H.push_back(hamiltonian_at(aux, t));
        }
        const HermitianCounterparts hc = hermitian_counterparts(eta, tr.I, H, alg);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const AuxPoint q = aux.at(grid[k]);
            EXPECT_LT(hc.I_h_defect[k], 1e-10) << pr.name;
            EXPECT_LT(hc.h_defect[k], 1e-10) << pr.name;
            EXPECT_LT(rel_to(hc.h[k], closed_form_hermitian_hamiltonian(pr.spec, q)), 1e-8)
                << pr.name << " t = " << grid[k];
            const AlgebraElement dIh = hermitian_invariant_rate(eta[k], tr.I[k], tr.dI[k], alg);
            EXPECT_LT(lr_residual_element(hc.I_h[k], dIh, hc.h[k], alg).max_abs(), 1e-7) << pr.name;
        }
    }
}

TEST(Counterparts, WrongMapRaisesHermiticityError) {
    const OperatorAlgebra alg;
    const Pairing pr = swanson_pairings()[1];
    auto aux = solve_aux(ConstraintSet(pr.spec), pr.ics, {0.0, 1.0});
    GroupElement eta = solve_closed_form(aux, 0.5);
    const GroupFactor& f = eta.factors()[0];
    GroupElement off({GroupFactor(Basis::X2, 0.5 * f.parameter, f.rate)});
    try {
        hermitian_counterparts({off}, {build_invariant(aux, 0.5)}, {hamiltonian_at(aux, 0.5)}, alg);
        FAIL() << "expected HermiticityError";
    } catch (const HermiticityError& e) {
        EXPECT_GT(e.defect(), 1e-3);
    }
    EXPECT_THROW(hermitian_counterparts({eta}, {}, {}, alg), PreconditionError);
}

TEST(Metric, Examples) {
    EXPECT_TRUE(metric(GroupElement()).empty());

    const GroupElement rho = metric(GroupElement({GroupFactor(Basis::X2, -0.3)}));
    ASSERT_EQ(rho.factors().size(), 1u);
    EXPECT_EQ(rho.factors()[0].generator, Basis::X2);
    EXPECT_DOUBLE_EQ(rho.factors()[0].parameter.real(), -0.6);

    // e^{eps p} e^{lam x}: rho = e^{lam x} e^{2 eps p} e^{lam x}
    const GroupElement cl = metric(GroupElement({GroupFactor(Basis::P, 0.2), GroupFactor(Basis::X, -0.1)}));
    ASSERT_EQ(cl.factors().size(), 3u);
    EXPECT_EQ(cl.factors()[0].generator, Basis::X);
    EXPECT_EQ(cl.factors()[1].generator, Basis::P);
    EXPECT_EQ(cl.factors()[2].generator, Basis::X);
    EXPECT_DOUBLE_EQ(cl.factors()[0].parameter.real(), -0.1);
    EXPECT_DOUBLE_EQ(cl.factors()[1].parameter.real(), 0.4);
    EXPECT_DOUBLE_EQ(cl.factors()[2].parameter.real(), -0.1);
}

TEST(Metric, IsSelfAdjoint) {
    std::mt19937_64 rng(60);
    for (int k = 0; k < 20; ++k) {
        const GroupElement rho = metric(ptinv::testing::random_group(rng, 3));
        const GroupElement adj = rho.dagger();
        const auto& a = rho.factors();
        const auto& b = adj.factors();
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a[i].generator, b[i].generator);
            EXPECT_EQ(a[i].parameter, b[i].parameter);
        }
    }
}
