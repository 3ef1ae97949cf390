#pragma once

// Lewis-Riesenfeld invariants I_H(t) obtained by pushing the reference
// Hamiltonian through the point transformation.

#include <array>
#include <optional>
#include <vector>

#include "ptinv/algebra.hpp"
#include "ptinv/pointtrans.hpp"

namespace ptinv {

// Closed-form coefficients of I_H in the order (p^2, p, {x,p}, x^2, x, 1).
// With u = sigma^s, k = sigma^-s, g = m sigma^(-1-r-s):
//   v = g (2 i alpha sigma - s sigma_t),  w = g (sigma gamma_t - s gamma sigma_t),
//   I = (u p + v x + w)^2 / 2m + m w_eff^2 k^2 (x + gamma)^2 / 2 + lin k (x + gamma)
// where lin is a (HO + a chi), i b (HO + i b chi) or 0.
template <class J>
std::array<J, 6> invariant_coefficients(const PointTransformSpec& spec, const AuxJets<J>& a) {
    const double m = spec.reference.m, r = spec.r, s = spec.s;
    const double we2 = spec.reference.omega_eff2();
    const cplx I(0.0, 1.0);
    cplx lin = 0.0;
    if (spec.reference.kind == ReferenceKind::LinearReal) lin = spec.reference.a;
    if (spec.reference.kind == ReferenceKind::LinearImaginary) lin = I * spec.reference.b;

    J alpha = spec.target.kind == TargetKind::ComplexLinear ? J(0.0) : a.alpha;
    J u = pow(a.sigma, s);
    J k = pow(a.sigma, -s);
    J g = m * pow(a.sigma, -1.0 - r - s);
    J v = g * (2.0 * I * alpha * a.sigma - s * a.sigma_t);
    J w = g * (a.sigma * a.gamma_t - s * a.gamma * a.sigma_t);
    J k2 = k * k;
    return {u * u / (2.0 * m),
            u * w / m,
            u * v / (2.0 * m),
            v * v / (2.0 * m) + 0.5 * m * we2 * k2,
            v * w / m + m * we2 * k2 * a.gamma + lin * k,
            w * w / (2.0 * m) + 0.5 * m * we2 * k2 * a.gamma * a.gamma + lin * k * a.gamma};
}

AlgebraElement build_invariant(const PointTransformSpec& spec, const AuxPoint& pt);
AlgebraElement build_invariant(const AuxTrajectory& aux, double t);
// d/dt I_H from forward-mode jets through the closed form.
AlgebraElement invariant_rate(const PointTransformSpec& spec, const AuxPoint& pt);
// Independent route: A^{-1} H0(chi, P_chi) A assembled with the algebra product.
AlgebraElement pushforward_invariant(const AuxTrajectory& aux, double t);

struct InvariantTrajectory {
    std::vector<double> grid;
    std::vector<AlgebraElement> I;
    std::vector<AlgebraElement> dI;  // analytic
};

InvariantTrajectory build_invariant_trajectory(const AuxTrajectory& aux, const std::vector<double>& grid);

// Five-point central differences of the closed form along the local flow
// through each sample (RK4 steps from the sampled state), independent of the jets.
std::vector<AlgebraElement> invariant_rate_fd(const AuxTrajectory& aux, const std::vector<double>& grid, double h = 1e-5);

// R = dI/dt + [I, H]/(i hbar)
AlgebraElement lr_residual_element(const AlgebraElement& I, const AlgebraElement& dI, const AlgebraElement& H,
                                   const OperatorAlgebra& alg);
// max_k |R_k| per sample. Throws PreconditionError on mismatched lengths.
std::vector<double> lr_residual(const InvariantTrajectory& traj, const std::vector<AlgebraElement>& H,
                                const OperatorAlgebra& alg);
std::vector<double> lr_residual(const std::vector<AlgebraElement>& I, const std::vector<AlgebraElement>& dI,
                                const std::vector<AlgebraElement>& H, const OperatorAlgebra& alg);

// a p^2 + b p + c {x,p} + d x^2 + e x + f, each split into real and imaginary
// parts. a_i and b_i vanish for the invariants built here but are kept so the
// split is lossless for any element.
struct CanonicalCoeffs {
    double a_r = 0, a_i = 0, b_r = 0, b_i = 0, c_r = 0, c_i = 0;
    double d_r = 0, d_i = 0, e_r = 0, e_i = 0, f_r = 0, f_i = 0;

    AlgebraElement reconstruct() const;
};

CanonicalCoeffs canonical_split(const AlgebraElement& e);

// |Im z| / (1 + |Re z|) < 1e-12
bool is_effectively_real(cplx z);

// r1 = e_i/2b_r, r2 = d_i/4c_r, r3 = c_i/2a_r. A ratio is undefined when its
// denominator vanishes or its numerator is zero (the relation is then vacuous).
struct SymmetryRatios {
    std::optional<double> r1, r2, r3;

    std::size_t defined() const { return r1.has_value() + r2.has_value() + r3.has_value(); }
    // max |r_k - target| / |target| over the defined ratios; nullopt if none.
    std::optional<double> spread(double target) const;
};

SymmetryRatios symmetry_ratios(const CanonicalCoeffs& c);

}  // namespace ptinv
