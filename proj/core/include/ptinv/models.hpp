#pragma once

// Reference Hamiltonians H0(chi, P) and time-dependent target Hamiltonians.

#include <optional>
#include <string>

#include "ptinv/algebra.hpp"
#include "ptinv/exprparse.hpp"

namespace ptinv {

enum class ReferenceKind {
    HarmonicOscillator,  // P^2/2m + m w^2 chi^2/2
    Free,                // P^2/2m
    LinearReal,          // HO + a chi
    LinearImaginary,     // HO + i b chi
    Dilation,            // HO + a {chi, P}
};

enum class TargetKind { SwansonFixedMass, SwansonVariableMass, ComplexLinear };

// How alpha_r(t) is supplied for the Swanson targets.
enum class AlphaRForm {
    Expression,  // user function of t
    SigmaPower,  // c2 * sigma^p
};

enum class AlphaIMode {
    Derived,  // reality condition fixes alpha_i from sigma and alpha_r
    Free,     // user expression (complex field mode only)
};

std::string to_string(ReferenceKind k);
std::string to_string(TargetKind k);

struct ReferenceModel {
    ReferenceKind kind = ReferenceKind::HarmonicOscillator;
    double m = 1.0;
    double omega = 1.0;
    double a = 0.0;
    double b = 0.0;

    void validate() const;
    // Square of the frequency left after completing the square in P.
    double omega_eff2() const;
};

AlgebraElement reference_element(const ReferenceModel& ref);

struct TargetModel {
    TargetKind kind = TargetKind::SwansonVariableMass;
    expr::Expr Omega = expr::Expr::constant(1.0);
    AlphaRForm alpha_r_form = AlphaRForm::Expression;
    std::optional<expr::Expr> alpha_r;  // Expression form
    double alpha_power = 0.0;           // SigmaPower form
    double c2 = 1.0;                    // SigmaPower form
    AlphaIMode alpha_i_mode = AlphaIMode::Derived;
    std::optional<expr::Expr> alpha_i;  // Free mode
    double m = 1.0;
    double b = 0.0;  // ComplexLinear: beta = b sigma^(r-s)
};

struct SwansonTilde {
    cplx alpha_tilde, beta_tilde, omega_tilde;
};

struct SwansonPhysical {
    double M, Omega;
    cplx alpha;
};

// alpha~ = M W^2/4 - 1/4M + alpha, beta~ = M W^2/4 - 1/4M - alpha, omega~ = M W^2/2 + 1/2M.
SwansonTilde swanson_reparam(double M, double Omega, cplx alpha);
// Throws DomainError when the tilde data do not come from real M > 0, Omega^2 >= 0.
SwansonPhysical swanson_reparam_inverse(const SwansonTilde& tilde, double tol = 1e-12);

// Coefficients (1/2M, 0, i alpha, M W^2/2, 0, 0) with M = m sigma^n.
AlgebraElement swanson_element(double m, double n, cplx sigma, cplx alpha, cplx Omega2);
// Coefficients (1/2M, 0, 0, M W^2/2, i beta, 0), beta = b sigma^(r-s).
AlgebraElement complex_linear_element(double m, double n, double b, double r, double s, cplx sigma, cplx Omega2);

// PT: x -> -x, p -> p, i -> -i. On coefficients
// (c0, c1, c2, c3, c4, c5) -> conj(c0, c1, -c2, c3, -c4, c5).
AlgebraElement pt_transform(const AlgebraElement& e);

}  // namespace ptinv
