#pragma once

// Point transformations chi = (x + gamma)/sigma^s, tau = int sigma^r,
// psi(chi, tau) = A(x,t) phi(x,t) between a reference and a target TDSE.

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ptinv/algebra.hpp"
#include "ptinv/auxode.hpp"
#include "ptinv/jet.hpp"
#include "ptinv/models.hpp"

namespace ptinv {

enum class FieldMode { Real, Complex };

enum class SpecialCase {
    None,
    AlphaIZeroFixedMass,    // alpha_r = c2 sigma^(r+2s), r = -2, s = 1
    AlphaIZeroShifted,      // alpha_r = c2 sigma^(r+2s), r = 0, s = -1
    GammaZeroR0,            // alpha_r = sigma^(-2-r), gamma = 0, r = 0
    GammaZeroRMinus2,       // alpha_r = sigma^(-2-r), gamma = 0, r = -2
    GammaNonzeroFixedMass,  // alpha_r = 1, gamma != 0, r = -2, s = 1
};

std::string to_string(SpecialCase c);

struct PointTransformSpec {
    ReferenceModel reference;
    TargetModel target;
    double r = -2.0;
    double s = 1.0;
    FieldMode field = FieldMode::Real;
    double hbar = 1.0;
    double c1 = 0.0;

    double n() const { return -r - 2.0 * s; }
};

struct AuxInitial {
    cplx sigma = 1.0;
    cplx sigma_t = 0.0;
    cplx gamma = 0.0;
    cplx gamma_t = 0.0;
};

SpecialCase detect_special_case(const PointTransformSpec& spec, const AuxInitial& ics);

// Time-dependent first-order jets (or plain values) of the aux data.
template <class J>
struct AuxJets {
    J sigma, sigma_t, gamma, gamma_t, alpha, Omega2, quad;
};

// Everything known at one instant.
struct AuxPoint {
    double t = 0.0;
    cplx sigma, sigma_t, sigma_tt;
    cplx gamma, gamma_t, gamma_tt;
    cplx alpha_r, alpha_r_t, alpha_r_tt;
    cplx alpha_i, alpha_i_t;
    cplx Omega2, Omega2_t;
    cplx tau;   // int_{t0}^t sigma^r
    cplx quad;  // integral entering delta for the H2, H4 and complex-linear pairings
    cplx quad_t;

    cplx alpha() const { return alpha_r + cplx(0.0, 1.0) * alpha_i; }
    cplx alpha_t() const { return alpha_r_t + cplx(0.0, 1.0) * alpha_i_t; }
    AuxJets<TimeJet<cplx>> jets() const;
    AuxJets<cplx> values() const;
};

// alpha_i from the reality condition: 1/4 [(alpha_r)_t/alpha_r - (r+2s) sigma_t/sigma].
double alpha_imag(double sigma, double sigma_t, double alpha_r, double alpha_r_t, double r, double s);

class ConstraintSet {
public:
    // Validates the pairing and exponents; throws UnsupportedError or PreconditionError.
    explicit ConstraintSet(PointTransformSpec spec);

    const PointTransformSpec& spec() const { return spec_; }

    // Coefficient K in K sigma_tt = F(sigma, sigma_t, t).
    double sigma_divisor() const { return K_; }

    // Local data from the state; tau and quad are left zero.
    AuxPoint local(double t, cplx sigma, cplx sigma_t, cplx gamma, cplx gamma_t) const;

    cplx tau_rate(cplx sigma) const;
    cplx quad_rate(cplx sigma, cplx sigma_t, cplx gamma, cplx gamma_t) const;
    // delta contains sigma^(1+r+2s) * quad_weight * quad.
    cplx quad_weight() const { return quad_weight_; }
    bool has_quad() const { return quad_weight_ != cplx(0.0); }

    // ln A = (i/hbar) (phi2 x^2 + phi1 x + phi0).
    template <class J>
    std::array<J, 3> phase(const AuxJets<J>& a) const;

    // Gamma(H0) = A^{-1} H0(chi, P_chi) A as an element in x, p.
    AlgebraElement pushforward(const AuxPoint& pt) const;
    // Hamiltonian whose TDSE the transformed phi satisfies.
    AlgebraElement induced_hamiltonian(const AuxPoint& pt) const;
    AlgebraElement target_hamiltonian(const AuxPoint& pt) const;

private:
    PointTransformSpec spec_;
    double K_ = 1.0;
    cplx quad_weight_ = 0.0;
};

// Cumulative integral of a smooth integrand sampled through dense output,
// by adaptive Simpson per accepted step.
class CumulativeQuadrature {
public:
    CumulativeQuadrature() = default;
    CumulativeQuadrature(std::function<cplx(double)> f, std::vector<double> nodes, double tol);
    cplx operator()(double t) const;

private:
    cplx segment(double a, double b) const;

    std::function<cplx(double)> f_;
    std::vector<double> nodes_;
    std::vector<cplx> cum_;
    double tol_ = 1e-13;
};

class AuxTrajectory {
public:
    AuxTrajectory(std::shared_ptr<const ConstraintSet> cs, Trajectory<cplx> traj);

    const ConstraintSet& constraints() const { return *cs_; }
    const PointTransformSpec& spec() const { return cs_->spec(); }
    const Trajectory<cplx>& raw() const { return *traj_; }
    Window window() const { return {traj_->t0(), traj_->t1()}; }
    bool covers(double t) const { return traj_->covers(t); }

    // Throws PreconditionError outside the window.
    AuxPoint at(double t) const;

    const std::vector<double>& step_times() const { return traj_->times(); }
    // Accepted steps merged with `uniform` evenly spaced report points.
    std::vector<double> report_grid(std::size_t uniform) const;

private:
    std::shared_ptr<const ConstraintSet> cs_;
    std::shared_ptr<const Trajectory<cplx>> traj_;
    CumulativeQuadrature tau_;
    CumulativeQuadrature quad_;
};

AuxTrajectory solve_aux(const ConstraintSet& cs, const AuxInitial& ics, Window window, const Tolerances& tol = {});

// H(t) of the target model along the aux trajectory.
AlgebraElement hamiltonian_at(const AuxTrajectory& aux, double t);

struct TransformValue {
    cplx chi, tau, A;
};

TransformValue evaluate_transform(const AuxTrajectory& aux, double t, double x);

// phi(x,t) = psi(chi(x,t), tau(t)) / A(x,t); psi solves the reference TDSE.
using ReferenceSolution = std::function<cplx(cplx chi, cplx tau)>;
cplx map_reference_solution(const AuxTrajectory& aux, const ReferenceSolution& psi, double t, double x);

// ---------------------------------------------------------------------------

template <class J>
std::array<J, 3> ConstraintSet::phase(const AuxJets<J>& a) const {
    const double m = spec_.reference.m, r = spec_.r, s = spec_.s;
    const cplx I(0.0, 1.0);
    J g = m * pow(a.sigma, -1.0 - r - 2.0 * s);
    J shift = a.sigma * a.gamma_t - s * a.gamma * a.sigma_t;
    J alpha = spec_.target.kind == TargetKind::ComplexLinear ? J(0.0) : a.alpha;
    J phi2 = g * (I * alpha * a.sigma - 0.5 * s * a.sigma_t);
    J phi1 = g * shift;
    J phi0 = 0.5 * a.gamma * g * shift +
             m * (spec_.c1 - I * (0.5 * s * spec_.hbar / m) * log(a.sigma) + quad_weight_ * a.quad);
    if (spec_.reference.kind == ReferenceKind::Dilation) {
        J e = spec_.reference.a * m * pow(a.sigma, -2.0 * s);
        phi2 -= e;
        phi1 -= 2.0 * e * a.gamma;
    }
    return {phi2, phi1, phi0};
}

}  // namespace ptinv
