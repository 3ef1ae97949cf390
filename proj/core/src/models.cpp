#include "ptinv/models.hpp"

#include <cmath>

#include "ptinv/errors.hpp"

namespace ptinv {

std::string to_string(ReferenceKind k) {
    switch (k) {
        case ReferenceKind::HarmonicOscillator: return "ho";
        case ReferenceKind::Free: return "free";
        case ReferenceKind::LinearReal: return "ho_linear";
        case ReferenceKind::LinearImaginary: return "ho_imaginary_linear";
        case ReferenceKind::Dilation: return "ho_dilation";
    }
    return "?";
}

std::string to_string(TargetKind k) {
    switch (k) {
        case TargetKind::SwansonFixedMass: return "swanson_fixed_mass";
        case TargetKind::SwansonVariableMass: return "swanson_variable_mass";
        case TargetKind::ComplexLinear: return "complex_linear";
    }
    return "?";
}

void ReferenceModel::validate() const {
    if (!(m > 0.0) || !std::isfinite(m)) throw PreconditionError("reference mass m must be positive");
    if (!std::isfinite(omega) || !std::isfinite(a) || !std::isfinite(b))
        throw PreconditionError("reference constants must be finite");
}

double ReferenceModel::omega_eff2() const {
    switch (kind) {
        case ReferenceKind::Free: return 0.0;
        case ReferenceKind::Dilation: return omega * omega - 4.0 * a * a;
        default: return omega * omega;
    }
}

AlgebraElement reference_element(const ReferenceModel& ref) {
    AlgebraElement::Coeffs c{};
    c[0] = 1.0 / (2.0 * ref.m);
    if (ref.kind != ReferenceKind::Free) c[3] = 0.5 * ref.m * ref.omega * ref.omega;
    switch (ref.kind) {
        case ReferenceKind::LinearReal: c[4] = ref.a; break;
        case ReferenceKind::LinearImaginary: c[4] = cplx(0.0, ref.b); break;
        case ReferenceKind::Dilation: c[2] = ref.a; break;
        default: break;
    }
    return AlgebraElement(c);
}

SwansonTilde swanson_reparam(double M, double Omega, cplx alpha) {
    if (!(M > 0.0)) throw PreconditionError("Swanson mass must be positive");
    double sym = M * Omega * Omega / 4.0 - 1.0 / (4.0 * M);
    return {sym + alpha, sym - alpha, M * Omega * Omega / 2.0 + 1.0 / (2.0 * M)};
}

SwansonPhysical swanson_reparam_inverse(const SwansonTilde& t, double tol) {
    cplx S = 0.5 * (t.alpha_tilde + t.beta_tilde);
    double scale = std::max({1.0, std::abs(t.alpha_tilde), std::abs(t.beta_tilde), std::abs(t.omega_tilde)});
    if (std::abs(S.imag()) > tol * scale || std::abs(t.omega_tilde.imag()) > tol * scale)
        throw DomainError("Swanson tilde data inconsistent: alpha~ + beta~ and omega~ must be real");
    double w = t.omega_tilde.real();
    double inv_M = w - 2.0 * S.real();
    if (!(inv_M > 0.0)) throw DomainError("Swanson tilde data infeasible: implied mass is not positive");
    double M = 1.0 / inv_M;
    double M_Omega2 = w + 2.0 * S.real();
    if (M_Omega2 < -tol * scale) throw DomainError("Swanson tilde data infeasible: implied Omega^2 < 0");
    double Omega = std::sqrt(std::max(0.0, M_Omega2 / M));
    return {M, Omega, 0.5 * (t.alpha_tilde - t.beta_tilde)};
}

AlgebraElement swanson_element(double m, double n, cplx sigma, cplx alpha, cplx Omega2) {
    cplx M = m * std::pow(sigma, n);
    AlgebraElement::Coeffs c{};
    c[0] = 1.0 / (2.0 * M);
    c[2] = cplx(0.0, 1.0) * alpha;
    c[3] = 0.5 * M * Omega2;
    return AlgebraElement(c);
}

AlgebraElement complex_linear_element(double m, double n, double b, double r, double s, cplx sigma, cplx Omega2) {
    cplx M = m * std::pow(sigma, n);
    AlgebraElement::Coeffs c{};
    c[0] = 1.0 / (2.0 * M);
    c[3] = 0.5 * M * Omega2;
    c[4] = cplx(0.0, b) * std::pow(sigma, r - s);
    return AlgebraElement(c);
}

AlgebraElement pt_transform(const AlgebraElement& e) {
    AlgebraElement::Coeffs c = e.coeffs();
    c[2] = -c[2];
    c[4] = -c[4];
    for (auto& z : c) z = std::conj(z);
    return AlgebraElement(c);
}

}  // namespace ptinv
