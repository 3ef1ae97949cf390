#include "ptinv/dyson.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "ptinv/errors.hpp"

namespace ptinv {

std::string to_string(DysonProvenance p) {
    return p == DysonProvenance::ClosedForm ? "closed-form" : "generic-newton";
}

GroupElement solve_closed_form(const PointTransformSpec& spec, const AuxPoint& pt) {
    using J = TimeJet<cplx>;
    const double m = spec.reference.m, r = spec.r, s = spec.s, hbar = spec.hbar;
    auto a = pt.jets();
    if (spec.target.kind == TargetKind::ComplexLinear) {
        const double w2 = spec.reference.omega * spec.reference.omega;
        if (w2 == 0.0) throw PreconditionError("complex linear Dyson map needs omega != 0");
        const double b = spec.reference.b;
        J eps = (b / (hbar * m * w2)) * pow(a.sigma, s);
        J lam = (-b * s / (hbar * w2)) * pow(a.sigma, -1.0 - r - s) * a.sigma_t;
        return GroupElement({GroupFactor(Basis::P, eps.v.real(), eps.d.real()),
                             GroupFactor(Basis::X, lam.v.real(), lam.d.real())});
    }
    if (pt.alpha_r == cplx(0.0)) throw PreconditionError("Swanson Dyson map needs alpha_r != 0");
    J ar(pt.alpha_r, pt.alpha_r_t);
    J theta = (-m / hbar) * ar * pow(a.sigma, spec.n());
    return GroupElement({GroupFactor(Basis::X2, theta.v.real(), theta.d.real())});
}

GroupElement solve_closed_form(const AuxTrajectory& aux, double t) { return solve_closed_form(aux.spec(), aux.at(t)); }

double swanson_theta_from_coeffs(const CanonicalCoeffs& c, double hbar) {
    if (c.a_r == 0.0) throw DomainError("a_r = 0");
    return -c.c_i / (2.0 * hbar * c.a_r);
}

LinearDysonParams complex_linear_from_coeffs(const CanonicalCoeffs& c, double hbar) {
    const double den = c.a_r * c.e_r - c.b_r * c.c_r;
    if (den == 0.0 || c.a_r == 0.0) throw DomainError("complex linear Dyson constraints are singular");
    const double eps = c.a_r * c.f_i / (hbar * den);
    return {eps, c.c_r * eps / c.a_r};
}

double complex_linear_identity_defect(const CanonicalCoeffs& c) {
    const double den = c.b_r * c.c_r - c.a_r * c.e_r;
    if (den == 0.0) throw DomainError("complex linear identity is singular");
    const double rhs = 2.0 * (c.c_r * c.c_r - c.a_r * c.d_r) * c.f_i / den;
    return std::abs(c.e_i - rhs) / std::max(std::abs(c.e_i), 1e-300);
}

GroupElement make_group(const std::vector<Basis>& family, const std::vector<double>& params,
                        const std::vector<double>& rates) {
    std::vector<GroupFactor> f;
    for (std::size_t k = 0; k < family.size(); ++k) {
        std::optional<cplx> rate;
        if (!rates.empty()) rate = rates[k];
        f.emplace_back(family[k], params[k], rate);
    }
    return GroupElement(std::move(f));
}

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

Vec6 imag_parts(const AlgebraElement& e) {
    Vec6 v;
    for (std::size_t i = 0; i < kBasisSize; ++i) v(static_cast<Eigen::Index>(i)) = e[i].imag();
    return v;
}

// Columns d/dtheta_k Im(eta I eta^{-1}) = Im [Ad_{prefix_k} G_k, eta I eta^{-1}].
Eigen::MatrixXd jacobian(const std::vector<Basis>& family, const std::vector<double>& params,
                         const AlgebraElement& Ih, const OperatorAlgebra& alg) {
    Eigen::MatrixXd Jm(6, static_cast<Eigen::Index>(family.size()));
    AdMatrix prefix = AdMatrix::Identity();
    for (std::size_t k = 0; k < family.size(); ++k) {
        AlgebraElement::Coeffs pc{};
        for (std::size_t i = 0; i < kBasisSize; ++i) pc[i] = prefix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(family[k]));
        AlgebraElement col = alg.commutator(AlgebraElement(pc), Ih);
        Jm.col(static_cast<Eigen::Index>(k)) = imag_parts(col);
        prefix = prefix * alg.adjoint_factor_matrix(GroupFactor(family[k], params[k]));
    }
    return Jm;
}

}  // namespace

NewtonResult solve_generic_one(const AlgebraElement& I, const std::vector<Basis>& family, std::vector<double> guess,
                               const OperatorAlgebra& alg, const NewtonOptions& opt) {
    if (family.empty()) throw PreconditionError("solve_generic: empty generator family");
    if (guess.empty()) guess.assign(family.size(), 0.0);
    if (guess.size() != family.size()) throw PreconditionError("solve_generic: guess size does not match family");
    const double scale = std::max(1.0, I.max_abs());

    NewtonResult res;
    res.params = std::move(guess);
    auto defect_of = [&](const std::vector<double>& th) {
        return imag_parts(alg.adjoint_action(make_group(family, th), I));
    };
    Vec6 D = defect_of(res.params);
    for (;;) {
        res.defect = D.cwiseAbs().maxCoeff();
        if (res.defect < opt.tolerance * scale) return res;
        if (res.iterations >= opt.max_iterations)
            throw ConvergenceError("Dyson map Newton solve did not converge (defect " + std::to_string(res.defect) + ")");
        ++res.iterations;

        AlgebraElement Ih = alg.adjoint_action(make_group(family, res.params), I);
        Eigen::MatrixXd Jm = jacobian(family, res.params, Ih, alg);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Jm, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        if (sv(0) == 0.0 || sv(sv.size() - 1) < 1e-12 * sv(0)) throw ConvergenceError("singular Jacobian in Dyson map Newton solve");
        Eigen::VectorXd step = svd.solve(-D);

        double lambda = 1.0;
        const double norm0 = D.norm();
        bool improved = false;
        for (int k = 0; k < 60; ++k) {
            std::vector<double> trial = res.params;
            for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += lambda * step(static_cast<Eigen::Index>(i));
            Vec6 Dt = defect_of(trial);
            if (Dt.norm() < norm0) {
                res.params = std::move(trial);
                D = Dt;
                improved = true;
                break;
            }
            lambda *= opt.damping;
        }
        if (!improved) {
            res.defect = D.cwiseAbs().maxCoeff();
            if (res.defect < 1e3 * opt.tolerance * scale) return res;  // stalled at rounding level
            throw ConvergenceError("Dyson map Newton solve stalled (defect " + std::to_string(res.defect) + ")");
        }
    }
}

std::vector<NewtonResult> solve_generic(const std::vector<AlgebraElement>& I, const std::vector<AlgebraElement>& dI,
                                        const std::vector<Basis>& family, std::vector<double> guess,
                                        const OperatorAlgebra& alg, const NewtonOptions& opt) {
    if (!dI.empty() && dI.size() != I.size()) throw PreconditionError("solve_generic: dI series length mismatch");
    std::vector<NewtonResult> out;
    out.reserve(I.size());
    for (std::size_t k = 0; k < I.size(); ++k) {
        NewtonResult r = solve_generic_one(I[k], family, guess, alg, opt);
        if (!dI.empty()) {
            // 0 = d/dt Im(eta I eta^-1) = J theta_dot + Im(Ad_eta dI)
            GroupElement eta = make_group(family, r.params);
            AlgebraElement Ih = alg.adjoint_action(eta, I[k]);
            Eigen::MatrixXd Jm = jacobian(family, r.params, Ih, alg);
            Vec6 rhs = -imag_parts(alg.adjoint_action(eta, dI[k]));
            Eigen::VectorXd th = Jm.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
            r.rates.assign(th.data(), th.data() + th.size());
        }
        guess = r.params;
        out.push_back(std::move(r));
    }
    return out;
}

HermitianCounterparts hermitian_counterparts(const std::vector<GroupElement>& eta, const std::vector<AlgebraElement>& I_H,
                                             const std::vector<AlgebraElement>& H, const OperatorAlgebra& alg, double tol) {
    if (eta.size() != I_H.size() || eta.size() != H.size())
        throw PreconditionError("hermitian_counterparts: series lengths differ");
    HermitianCounterparts out;
    const cplx ih(0.0, alg.hbar());
    for (std::size_t k = 0; k < eta.size(); ++k) {
        AlgebraElement Ih = alg.adjoint_action(eta[k], I_H[k]);
        AlgebraElement h = alg.adjoint_action(eta[k], H[k]) + ih * alg.flow_derivative(eta[k]);
        double dI = Ih.hermiticity_defect(), dh = h.hermiticity_defect();
        if (dI > tol * std::max(1.0, Ih.max_abs())) throw HermiticityError("I_h is not Hermitian", dI);
        if (dh > tol * std::max(1.0, h.max_abs())) throw HermiticityError("h is not Hermitian", dh);
        out.I_h.push_back(Ih);
        out.h.push_back(h);
        out.I_h_defect.push_back(dI);
        out.h_defect.push_back(dh);
    }
    return out;
}

AlgebraElement hermitian_invariant_rate(const GroupElement& eta, const AlgebraElement& I, const AlgebraElement& dI,
                                        const OperatorAlgebra& alg) {
    AlgebraElement Ih = alg.adjoint_action(eta, I);
    return alg.adjoint_action(eta, dI) + alg.commutator(alg.flow_derivative(eta), Ih);
}

GroupElement metric(const GroupElement& eta) { return eta.dagger().then(eta).simplified(); }

AlgebraElement closed_form_hermitian_hamiltonian(const PointTransformSpec& spec, const AuxPoint& pt) {
    const double m = spec.reference.m, r = spec.r, s = spec.s;
    const cplx sig = pt.sigma;
    const cplx mass_inv = std::pow(sig, r + 2.0 * s) / (2.0 * m);
    const cplx pot = 0.5 * m * std::pow(sig, -r - 2.0 * s) * pt.Omega2;
    AlgebraElement::Coeffs c{};
    c[0] = mass_inv;
    if (spec.target.kind == TargetKind::ComplexLinear) {
        const double b = spec.reference.b, w = spec.reference.omega;
        c[3] = pot;
        c[5] = b * b * std::pow(sig, -r - 2.0) * (sig * sig * pt.Omega2 - s * s * pt.sigma_t * pt.sigma_t) /
               (2.0 * m * w * w * w * w);
    } else {
        c[3] = 2.0 * m * pt.alpha_r * pt.alpha_r * std::pow(sig, -r - 2.0 * s) + pot;
        c[2] = 0.25 * ((r + 2.0 * s) * pt.sigma_t / sig - pt.alpha_r_t / pt.alpha_r);
    }
    return AlgebraElement(c);
}

double swanson_Ih_x2_shift(const PointTransformSpec& spec, const AuxPoint& pt) {
    const double m = spec.reference.m;
    const cplx a_r = std::pow(pt.sigma, 2.0 * spec.s) / (2.0 * m);
    return (4.0 * m * m * a_r * pt.alpha_r * pt.alpha_r * std::pow(pt.sigma, -2.0 * spec.r - 4.0 * spec.s)).real();
}

}  // namespace ptinv
