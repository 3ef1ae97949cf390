#include "ptinv/invariants.hpp"

#include <algorithm>
#include <cmath>

#include "ptinv/errors.hpp"

namespace ptinv {

AlgebraElement build_invariant(const PointTransformSpec& spec, const AuxPoint& pt) {
    if (spec.field == FieldMode::Real && !(pt.sigma.real() > 0.0)) throw DomainError("sigma <= 0");
    auto c = invariant_coefficients(spec, pt.values());
    return AlgebraElement(AlgebraElement::Coeffs{c[0], c[1], c[2], c[3], c[4], c[5]});
}

AlgebraElement build_invariant(const AuxTrajectory& aux, double t) { return build_invariant(aux.spec(), aux.at(t)); }

AlgebraElement invariant_rate(const PointTransformSpec& spec, const AuxPoint& pt) {
    auto c = invariant_coefficients(spec, pt.jets());
    return AlgebraElement(AlgebraElement::Coeffs{c[0].d, c[1].d, c[2].d, c[3].d, c[4].d, c[5].d});
}

AlgebraElement pushforward_invariant(const AuxTrajectory& aux, double t) {
    return aux.constraints().pushforward(aux.at(t));
}

InvariantTrajectory build_invariant_trajectory(const AuxTrajectory& aux, const std::vector<double>& grid) {
    InvariantTrajectory out;
    out.grid = grid;
    out.I.reserve(grid.size());
    out.dI.reserve(grid.size());
    for (double t : grid) {
        AuxPoint p = aux.at(t);
        out.I.push_back(build_invariant(aux.spec(), p));
        out.dI.push_back(invariant_rate(aux.spec(), p));
    }
    return out;
}

namespace {

// One RK4 step of the sigma/gamma system from a sampled state. Used so that
// the difference quotient follows the exact local flow rather than the
// interpolant, whose derivative is only consistent to the step tolerance.
AuxPoint flow_step(const ConstraintSet& cs, const AuxPoint& p, double h) {
    using State = std::array<cplx, 4>;
    auto f = [&](double t, const State& y) {
        AuxPoint q = cs.local(t, y[0], y[1], y[2], y[3]);
        return State{y[1], q.sigma_tt, y[3], q.gamma_tt};
    };
    auto axpy = [](const State& y, const State& k, double a) {
        State r;
        for (std::size_t i = 0; i < 4; ++i) r[i] = y[i] + a * k[i];
        return r;
    };
    const State y{p.sigma, p.sigma_t, p.gamma, p.gamma_t};
    const State k1 = f(p.t, y);
    const State k2 = f(p.t + 0.5 * h, axpy(y, k1, 0.5 * h));
    const State k3 = f(p.t + 0.5 * h, axpy(y, k2, 0.5 * h));
    const State k4 = f(p.t + h, axpy(y, k3, h));
    State n;
    for (std::size_t i = 0; i < 4; ++i) n[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return cs.local(p.t + h, n[0], n[1], n[2], n[3]);
}

}  // namespace

std::vector<AlgebraElement> invariant_rate_fd(const AuxTrajectory& aux, const std::vector<double>& grid, double h) {
    const ConstraintSet& cs = aux.constraints();
    std::vector<AlgebraElement> out;
    out.reserve(grid.size());
    for (double t : grid) {
        AuxPoint p = aux.at(t);
        auto I = [&](double dt) { return build_invariant(cs.spec(), flow_step(cs, p, dt)); };
        out.push_back(cplx(1.0 / (12.0 * h)) * (cplx(8.0) * (I(h) - I(-h)) - (I(2.0 * h) - I(-2.0 * h))));
    }
    return out;
}

AlgebraElement lr_residual_element(const AlgebraElement& I, const AlgebraElement& dI, const AlgebraElement& H,
                                   const OperatorAlgebra& alg) {
    return dI + cplx(0.0, -1.0 / alg.hbar()) * alg.commutator(I, H);
}

std::vector<double> lr_residual(const std::vector<AlgebraElement>& I, const std::vector<AlgebraElement>& dI,
                                const std::vector<AlgebraElement>& H, const OperatorAlgebra& alg) {
    if (I.size() != dI.size() || I.size() != H.size())
        throw PreconditionError("lr_residual: invariant and Hamiltonian series have different grids");
    std::vector<double> out(I.size());
    for (std::size_t k = 0; k < I.size(); ++k) out[k] = lr_residual_element(I[k], dI[k], H[k], alg).max_abs();
    return out;
}

std::vector<double> lr_residual(const InvariantTrajectory& traj, const std::vector<AlgebraElement>& H,
                                const OperatorAlgebra& alg) {
    return lr_residual(traj.I, traj.dI, H, alg);
}

AlgebraElement CanonicalCoeffs::reconstruct() const {
    return AlgebraElement(AlgebraElement::Coeffs{cplx(a_r, a_i), cplx(b_r, b_i), cplx(c_r, c_i), cplx(d_r, d_i),
                                                 cplx(e_r, e_i), cplx(f_r, f_i)});
}

CanonicalCoeffs canonical_split(const AlgebraElement& e) {
    CanonicalCoeffs c;
    c.a_r = e[0].real(), c.a_i = e[0].imag();
    c.b_r = e[1].real(), c.b_i = e[1].imag();
    c.c_r = e[2].real(), c.c_i = e[2].imag();
    c.d_r = e[3].real(), c.d_i = e[3].imag();
    c.e_r = e[4].real(), c.e_i = e[4].imag();
    c.f_r = e[5].real(), c.f_i = e[5].imag();
    return c;
}

bool is_effectively_real(cplx z) { return std::abs(z.imag()) / (1.0 + std::abs(z.real())) < 1e-12; }

namespace {

std::optional<double> ratio(double num_imag, double num_real, double den) {
    if (is_effectively_real(cplx(num_real, num_imag))) return std::nullopt;
    if (std::abs(den) < 1e-14 * (std::abs(num_imag) + 1e-300)) return std::nullopt;
    if (den == 0.0) return std::nullopt;
    return num_imag / den;
}

}  // namespace

SymmetryRatios symmetry_ratios(const CanonicalCoeffs& c) {
    SymmetryRatios r;
    r.r1 = ratio(c.e_i, c.e_r, 2.0 * c.b_r);
    r.r2 = ratio(c.d_i, c.d_r, 4.0 * c.c_r);
    r.r3 = ratio(c.c_i, c.c_r, 2.0 * c.a_r);
    return r;
}

std::optional<double> SymmetryRatios::spread(double target) const {
    std::optional<double> worst;
    for (const auto& q : {r1, r2, r3}) {
        if (!q) continue;
        double d = std::abs(*q - target) / std::max(std::abs(target), 1e-300);
        worst = std::max(worst.value_or(0.0), d);
    }
    return worst;
}

}  // namespace ptinv
