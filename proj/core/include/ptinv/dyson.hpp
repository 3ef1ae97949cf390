#pragma once

// Dyson maps eta(t) with eta I_H eta^{-1} Hermitian, the Hermitian invariant
// I_h, the Hermitian Hamiltonian h = eta H eta^{-1} + i hbar eta_t eta^{-1},
// and the metric rho = eta^dagger eta.

#include <string>
#include <vector>

#include "ptinv/algebra.hpp"
#include "ptinv/invariants.hpp"
#include "ptinv/pointtrans.hpp"

namespace ptinv {

enum class DysonProvenance { ClosedForm, GenericNewton };
std::string to_string(DysonProvenance p);

// Swanson targets: exp(theta2 x^2) with theta2 = -alpha_r m sigma^(-r-2s) / hbar.
// Complex linear target: exp(eps p) exp(lambda x) with
//   eps = b sigma^s / (hbar m w^2),  lambda = -b s sigma^(-1-r-s) sigma_t / (hbar w^2).
// Parameter rates are exact (jets through the same formulas).
GroupElement solve_closed_form(const PointTransformSpec& spec, const AuxPoint& pt);
GroupElement solve_closed_form(const AuxTrajectory& aux, double t);

// The same parameters expressed through invariant coefficients only.
double swanson_theta_from_coeffs(const CanonicalCoeffs& c, double hbar);
struct LinearDysonParams {
    double epsilon;
    double lambda;
};
// eps = a_r f_i / (hbar (a_r e_r - b_r c_r)), lambda = c_r eps / a_r.
LinearDysonParams complex_linear_from_coeffs(const CanonicalCoeffs& c, double hbar);
// Relative defect of e_i = 2 (c_r^2 - a_r d_r) f_i / (b_r c_r - a_r e_r).
double complex_linear_identity_defect(const CanonicalCoeffs& c);

struct NewtonOptions {
    int max_iterations = 50;
    double tolerance = 1e-12;  // on max |Im| of eta I eta^{-1}, relative to max(1, |I|)
    double damping = 0.5;      // backtracking factor
};

struct NewtonResult {
    std::vector<double> params;
    std::vector<double> rates;  // filled when dI is supplied
    int iterations = 0;
    double defect = 0.0;
};

GroupElement make_group(const std::vector<Basis>& family, const std::vector<double>& params,
                        const std::vector<double>& rates = {});

// Gauss-Newton on the imaginary parts of eta I eta^{-1}; eta is the ordered
// product exp(theta_k G_k) over `family`. Throws ConvergenceError.
NewtonResult solve_generic_one(const AlgebraElement& I, const std::vector<Basis>& family,
                               std::vector<double> guess, const OperatorAlgebra& alg,
                               const NewtonOptions& opt = {});

// Continuation over a series; rates from implicit differentiation of the
// defect equations when dI is non-empty.
std::vector<NewtonResult> solve_generic(const std::vector<AlgebraElement>& I, const std::vector<AlgebraElement>& dI,
                                        const std::vector<Basis>& family, std::vector<double> guess,
                                        const OperatorAlgebra& alg, const NewtonOptions& opt = {});

struct HermitianCounterparts {
    std::vector<AlgebraElement> I_h;
    std::vector<AlgebraElement> h;
    std::vector<double> I_h_defect;
    std::vector<double> h_defect;
};

// Throws HermiticityError when a defect exceeds `tol` (scaled by max(1, |element|)).
HermitianCounterparts hermitian_counterparts(const std::vector<GroupElement>& eta,
                                             const std::vector<AlgebraElement>& I_H,
                                             const std::vector<AlgebraElement>& H, const OperatorAlgebra& alg,
                                             double tol = 1e-8);

// d/dt (eta I eta^{-1}) = Ad_eta(dI) + [eta_t eta^{-1}, Ad_eta(I)]
AlgebraElement hermitian_invariant_rate(const GroupElement& eta, const AlgebraElement& I, const AlgebraElement& dI,
                                        const OperatorAlgebra& alg);

GroupElement metric(const GroupElement& eta);

// Closed expressions for the Hermitian Hamiltonian.
//   Swanson: sigma^(r+2s)/2m p^2 + (2 m alpha_r^2 + m Omega^2/2) sigma^(-r-2s) x^2
//            + 1/4 d/dt ln(sigma^(r+2s)/alpha_r) {x,p}
//   complex linear: sigma^(r+2s)/2m p^2 + m Omega^2 sigma^(-r-2s)/2 x^2
//            + b^2 sigma^(-r-2) (sigma^2 Omega^2 - s^2 sigma_t^2) / (2 m w^4)
AlgebraElement closed_form_hermitian_hamiltonian(const PointTransformSpec& spec, const AuxPoint& pt);
// 2 m alpha_r^2 sigma^(-2r-2s), i.e. 4 m^2 a_r alpha_r^2 sigma^(-2r-4s)
double swanson_Ih_x2_shift(const PointTransformSpec& spec, const AuxPoint& pt);

}  // namespace ptinv
