#include "ptinv/pointtrans.hpp"

#include <algorithm>
#include <cmath>

#include "ptinv/errors.hpp"

namespace ptinv {
namespace {

const cplx I(0.0, 1.0);

bool near(double a, double b) { return std::abs(a - b) < 1e-12; }

bool is_swanson(TargetKind k) { return k != TargetKind::ComplexLinear; }

}  // namespace

std::string to_string(SpecialCase c) {
    switch (c) {
        case SpecialCase::None: return "none";
        case SpecialCase::AlphaIZeroFixedMass: return "alpha_i_zero_fixed_mass";
        case SpecialCase::AlphaIZeroShifted: return "alpha_i_zero_r0_s-1";
        case SpecialCase::GammaZeroR0: return "gamma_zero_r0";
        case SpecialCase::GammaZeroRMinus2: return "gamma_zero_r-2";
        case SpecialCase::GammaNonzeroFixedMass: return "gamma_nonzero_r-2_s1";
    }
    return "?";
}

SpecialCase detect_special_case(const PointTransformSpec& spec, const AuxInitial& ics) {
    const auto& tg = spec.target;
    if (spec.reference.kind != ReferenceKind::HarmonicOscillator || !is_swanson(tg.kind) ||
        spec.field != FieldMode::Real || tg.alpha_r_form != AlphaRForm::SigmaPower)
        return SpecialCase::None;
    const double r = spec.r, s = spec.s, p = tg.alpha_power;
    const bool gamma_zero = ics.gamma == cplx(0.0) && ics.gamma_t == cplx(0.0);
    const bool unit_c2 = near(tg.c2, 1.0);
    if (near(p, -2.0 - r) && unit_c2) {
        if (!gamma_zero && near(r, -2.0) && near(s, 1.0)) return SpecialCase::GammaNonzeroFixedMass;
        if (gamma_zero && near(r, 0.0)) return SpecialCase::GammaZeroR0;
        if (gamma_zero && near(r, -2.0)) return SpecialCase::GammaZeroRMinus2;
    }
    if (near(p, r + 2.0 * s)) {
        if (near(r, -2.0) && near(s, 1.0)) return SpecialCase::AlphaIZeroFixedMass;
        if (near(r, 0.0) && near(s, -1.0)) return SpecialCase::AlphaIZeroShifted;
    }
    return SpecialCase::None;
}

AuxJets<TimeJet<cplx>> AuxPoint::jets() const {
    using J = TimeJet<cplx>;
    return {J(sigma, sigma_t), J(sigma_t, sigma_tt), J(gamma, gamma_t), J(gamma_t, gamma_tt),
            J(alpha(), alpha_t()), J(Omega2, Omega2_t), J(quad, quad_t)};
}

AuxJets<cplx> AuxPoint::values() const {
    return {sigma, sigma_t, gamma, gamma_t, alpha(), Omega2, quad};
}

double alpha_imag(double sigma, double sigma_t, double alpha_r, double alpha_r_t, double r, double s) {
    if (sigma == 0.0) throw DomainError("alpha_imag: sigma = 0");
    if (alpha_r == 0.0) throw DomainError("alpha_imag: alpha_r = 0 (invalid branch)");
    return 0.25 * (alpha_r_t / alpha_r - (r + 2.0 * s) * sigma_t / sigma);
}

ConstraintSet::ConstraintSet(PointTransformSpec spec) : spec_(std::move(spec)) {
    const auto& ref = spec_.reference;
    const auto& tg = spec_.target;
    ref.validate();
    if (!(spec_.hbar > 0.0)) throw PreconditionError("hbar must be positive");
    if (!std::isfinite(spec_.r) || !std::isfinite(spec_.s)) throw PreconditionError("r and s must be finite");
    if (std::abs(tg.m - ref.m) > 1e-14 * ref.m) throw PreconditionError("target mass constant must equal the reference mass");

    const double r = spec_.r, s = spec_.s;
    switch (tg.kind) {
        case TargetKind::SwansonFixedMass:
            if (ref.kind != ReferenceKind::HarmonicOscillator)
                throw UnsupportedError("unsupported pairing: fixed-mass Swanson target needs the harmonic oscillator reference");
            if (!near(r, -2.0) || !near(s, 1.0))
                throw PreconditionError("fixed-mass Swanson target requires r = -2, s = 1");
            break;
        case TargetKind::SwansonVariableMass:
            if (ref.kind == ReferenceKind::LinearImaginary)
                throw UnsupportedError("unsupported pairing: imaginary linear reference maps to the complex linear target");
            break;
        case TargetKind::ComplexLinear:
            if (ref.kind != ReferenceKind::LinearImaginary)
                throw UnsupportedError("unsupported pairing: complex linear target needs the imaginary linear reference");
            if (std::abs(tg.b - ref.b) > 1e-14 * std::max(1.0, std::abs(ref.b)))
                throw PreconditionError("complex linear target b must equal the reference b");
            break;
    }

    if (spec_.field == FieldMode::Complex) {
        if (tg.kind != TargetKind::SwansonFixedMass)
            throw UnsupportedError("complex field mode supports only the fixed-mass Swanson pairing");
        if (tg.alpha_r_form != AlphaRForm::Expression || !tg.alpha_r)
            throw PreconditionError("complex field mode needs alpha_r as an expression");
        if (tg.alpha_i_mode != AlphaIMode::Free || !tg.alpha_i)
            throw PreconditionError("complex field mode needs alpha_i as an expression");
    } else if (is_swanson(tg.kind)) {
        if (tg.alpha_i_mode != AlphaIMode::Derived)
            throw PreconditionError("real field mode derives alpha_i from the reality condition");
        if (tg.alpha_r_form == AlphaRForm::Expression && !tg.alpha_r)
            throw PreconditionError("alpha_r expression missing");
        if (tg.alpha_r_form == AlphaRForm::SigmaPower && tg.c2 == 0.0)
            throw PreconditionError("alpha_r = c2 sigma^p needs c2 != 0");
    }

    // K sigma_tt = F; K = s + 2 sigma kappa_i where alpha_i' = ... + kappa_i sigma_tt.
    if (!is_swanson(tg.kind) || spec_.field == FieldMode::Complex) {
        K_ = s;
    } else if (tg.alpha_r_form == AlphaRForm::Expression) {
        K_ = -0.5 * r;
    } else {
        K_ = 0.5 * (tg.alpha_power - r);
    }
    if (std::abs(K_) < 1e-12) {
        if (!is_swanson(tg.kind) || spec_.field == FieldMode::Complex)
            throw PreconditionError("s = 0 makes the sigma equation singular");
        if (tg.alpha_r_form == AlphaRForm::Expression)
            throw PreconditionError("r = 0 makes the sigma equation singular for an alpha_r expression");
        throw PreconditionError("alpha_r = c2 sigma^p with p = r makes the sigma equation singular");
    }

    switch (ref.kind) {
        case ReferenceKind::LinearReal: quad_weight_ = -ref.a / (2.0 * ref.m); break;
        case ReferenceKind::Dilation: quad_weight_ = 2.0 * ref.a; break;
        case ReferenceKind::LinearImaginary: quad_weight_ = -I * ref.b / ref.m; break;
        default: quad_weight_ = 0.0; break;
    }
}

cplx ConstraintSet::tau_rate(cplx sigma) const { return std::pow(sigma, spec_.r); }

cplx ConstraintSet::quad_rate(cplx sigma, cplx sigma_t, cplx gamma, cplx gamma_t) const {
    const double r = spec_.r, s = spec_.s;
    switch (spec_.reference.kind) {
        case ReferenceKind::LinearReal:
        case ReferenceKind::LinearImaginary: return gamma * std::pow(sigma, r - s);
        case ReferenceKind::Dilation:
            return gamma * std::pow(sigma, -1.0 - 2.0 * s) * (s * gamma * sigma_t - sigma * gamma_t);
        default: return 0.0;
    }
}

AuxPoint ConstraintSet::local(double t, cplx sigma, cplx sigma_t, cplx gamma, cplx gamma_t) const {
    const auto& tg = spec_.target;
    const double r = spec_.r, s = spec_.s, m = spec_.reference.m;
    const double we2 = spec_.reference.omega_eff2();

    AuxPoint p;
    p.t = t;
    p.sigma = sigma;
    p.sigma_t = sigma_t;
    p.gamma = gamma;
    p.gamma_t = gamma_t;

    expr::Jet2 Om = tg.Omega.eval_jet2(t);
    p.Omega2 = Om.value * Om.value;
    p.Omega2_t = 2.0 * Om.value * Om.d1;

    // alpha_i' = ai_t0 + kappa_i sigma_tt
    cplx ai_t0 = 0.0, kappa_i = 0.0;
    const bool power = tg.alpha_r_form == AlphaRForm::SigmaPower;
    if (is_swanson(tg.kind)) {
        if (spec_.field == FieldMode::Complex) {
            expr::Jet2 ar = tg.alpha_r->eval_jet2(t);
            expr::Jet2 ai = tg.alpha_i->eval_jet2(t);
            p.alpha_r = ar.value;
            p.alpha_r_t = ar.d1;
            p.alpha_r_tt = ar.d2;
            p.alpha_i = ai.value;
            ai_t0 = ai.d1;
        } else if (!power) {
            expr::Jet2 ar = tg.alpha_r->eval_jet2(t);
            if (ar.value == 0.0) throw DomainError("alpha_r vanishes at t = " + std::to_string(t));
            p.alpha_r = ar.value;
            p.alpha_r_t = ar.d1;
            p.alpha_r_tt = ar.d2;
            const double lr = ar.d1 / ar.value;
            const double Q0 = ar.d2 / ar.value - lr * lr;
            p.alpha_i = 0.25 * (lr - (r + 2.0 * s) * sigma_t / sigma);
            ai_t0 = 0.25 * (Q0 + (r + 2.0 * s) * sigma_t * sigma_t / (sigma * sigma));
            kappa_i = -(r + 2.0 * s) / (4.0 * sigma);
        } else {
            const double pw = tg.alpha_power;
            p.alpha_r = tg.c2 * std::pow(sigma, pw);
            p.alpha_r_t = tg.c2 * pw * std::pow(sigma, pw - 1.0) * sigma_t;
            const double q = pw - r - 2.0 * s;
            p.alpha_i = 0.25 * q * sigma_t / sigma;
            ai_t0 = -0.25 * q * sigma_t * sigma_t / (sigma * sigma);
            kappa_i = q / (4.0 * sigma);
        }
    }
    const cplx alpha = p.alpha();
    const cplx alpha_t0 = p.alpha_r_t + I * ai_t0;

    const cplx F = we2 * std::pow(sigma, 2.0 * r + 1.0) + s * (r + s + 1.0) * sigma_t * sigma_t / sigma -
                   2.0 * I * (r + 2.0 * s) * alpha * sigma_t +
                   sigma * (2.0 * I * alpha_t0 - 4.0 * alpha * alpha - p.Omega2);
    p.sigma_tt = F / K_;
    p.alpha_i_t = ai_t0 + kappa_i * p.sigma_tt;
    if (is_swanson(tg.kind) && spec_.field == FieldMode::Real && power) {
        const double pw = tg.alpha_power;
        p.alpha_r_tt = tg.c2 * pw *
                       ((pw - 1.0) * std::pow(sigma, pw - 2.0) * sigma_t * sigma_t +
                        std::pow(sigma, pw - 1.0) * p.sigma_tt);
    }

    cplx lin = 0.0;
    if (spec_.reference.kind == ReferenceKind::LinearReal)
        lin = -spec_.reference.a * std::pow(sigma, 2.0 * r + s) / m;
    p.gamma_tt = (r + 2.0 * s) * gamma_t * sigma_t / sigma + s * gamma * p.sigma_tt / sigma -
                 s * (r + s + 1.0) * gamma * sigma_t * sigma_t / (sigma * sigma) -
                 we2 * gamma * std::pow(sigma, 2.0 * r) + lin;
    p.quad_t = quad_rate(sigma, sigma_t, gamma, gamma_t);
    return p;
}

AlgebraElement ConstraintSet::pushforward(const AuxPoint& pt) const {
    const OperatorAlgebra alg(spec_.hbar);
    const double s = spec_.s;
    auto ph = phase(pt.values());
    const cplx us = std::pow(pt.sigma, s);
    const cplx k = std::pow(pt.sigma, -s);
    // Pi = A^{-1} P_chi A = sigma^s (p + Phi_x), chi = (x + gamma) sigma^-s
    AlgebraElement Pi(AlgebraElement::Coeffs{0.0, us, 0.0, 0.0, us * 2.0 * ph[0], us * ph[1]});
    AlgebraElement chi(AlgebraElement::Coeffs{0.0, 0.0, 0.0, 0.0, k, k * pt.gamma});

    const AlgebraElement h0 = reference_element(spec_.reference);
    AlgebraElement out;
    out += h0[Basis::P2] * alg.product_linear(Pi, Pi);
    out += h0[Basis::P] * Pi;
    out += h0[Basis::XP] * (alg.product_linear(chi, Pi) + alg.product_linear(Pi, chi));
    out += h0[Basis::X2] * alg.product_linear(chi, chi);
    out += h0[Basis::X] * chi;
    out += AlgebraElement::unit(Basis::One, h0[Basis::One]);
    return out;
}

AlgebraElement ConstraintSet::induced_hamiltonian(const AuxPoint& pt) const {
    const double s = spec_.s, hbar = spec_.hbar;
    auto ph = phase(pt.jets());
    const cplx phi2 = ph[0].v, phi1 = ph[1].v;
    // chi_t / chi_x = l0 + l1 x
    const cplx l1 = -s * pt.sigma_t / pt.sigma;
    const cplx l0 = pt.gamma_t - s * pt.gamma * pt.sigma_t / pt.sigma;

    AlgebraElement h = tau_rate(pt.sigma) * pushforward(pt);
    AlgebraElement::Coeffs c{};
    // -L p with x p = ({x,p} + i hbar)/2
    c[1] = -l0;
    c[2] = -0.5 * l1;
    c[5] = -0.5 * I * hbar * l1;
    // i hbar L (ln A)_x = -L Phi_x
    c[3] += -2.0 * l1 * phi2;
    c[4] += -(2.0 * l0 * phi2 + l1 * phi1);
    c[5] += -l0 * phi1;
    // -i hbar (ln A)_t = Phi_t
    c[3] += ph[0].d;
    c[4] += ph[1].d;
    c[5] += ph[2].d;
    return h + AlgebraElement(c);
}

AlgebraElement ConstraintSet::target_hamiltonian(const AuxPoint& pt) const {
    const auto& tg = spec_.target;
    if (tg.kind == TargetKind::ComplexLinear)
        return complex_linear_element(tg.m, spec_.n(), tg.b, spec_.r, spec_.s, pt.sigma, pt.Omega2);
    return swanson_element(tg.m, spec_.n(), pt.sigma, pt.alpha(), pt.Omega2);
}

// ---------------------------------------------------------------------------

CumulativeQuadrature::CumulativeQuadrature(std::function<cplx(double)> f, std::vector<double> nodes, double tol)
    : f_(std::move(f)), nodes_(std::move(nodes)), tol_(tol) {
    cum_.resize(nodes_.size());
    cum_[0] = 0.0;
    for (std::size_t k = 1; k < nodes_.size(); ++k) cum_[k] = cum_[k - 1] + segment(nodes_[k - 1], nodes_[k]);
}

cplx CumulativeQuadrature::segment(double a, double b) const {
    struct Rec {
        const std::function<cplx(double)>& f;
        cplx run(double a, double b, cplx fa, cplx fm, cplx fb, cplx whole, double tol, int depth) const {
            double m = 0.5 * (a + b);
            double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            cplx flm = f(lm), frm = f(rm);
            cplx left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            cplx right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            cplx diff = left + right - whole;
            if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
            return run(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
                   run(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        }
    };
    if (b <= a) return 0.0;
    cplx fa = f_(a), fb = f_(b), fm = f_(0.5 * (a + b));
    cplx whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double tol = tol_ * std::max(1.0, std::abs(whole));
    return Rec{f_}.run(a, b, fa, fm, fb, whole, tol, 40);
}

cplx CumulativeQuadrature::operator()(double t) const {
    if (nodes_.empty()) return 0.0;
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
    std::size_t k = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
    k = std::min(k, nodes_.size() - 1);
    if (t == nodes_[k]) return cum_[k];
    if (t < nodes_[k]) return cum_[k] - segment(t, nodes_[k]);
    return cum_[k] + segment(nodes_[k], t);
}

AuxTrajectory::AuxTrajectory(std::shared_ptr<const ConstraintSet> cs, Trajectory<cplx> traj)
    : cs_(std::move(cs)), traj_(std::make_shared<const Trajectory<cplx>>(std::move(traj))) {
    auto c = cs_;
    auto tr = traj_;
    tau_ = CumulativeQuadrature([c, tr](double t) { return c->tau_rate(tr->state_at(t)[0]); }, tr->times(), 1e-14);
    if (cs_->has_quad()) {
        quad_ = CumulativeQuadrature(
            [c, tr](double t) {
                auto y = tr->state_at(t);
                return c->quad_rate(y[0], y[1], y[2], y[3]);
            },
            tr->times(), 1e-14);
    }
}

AuxPoint AuxTrajectory::at(double t) const {
    if (!covers(t)) throw PreconditionError("time " + std::to_string(t) + " outside the aux window");
    auto y = traj_->state_at(t);
    AuxPoint p = cs_->local(t, y[0], y[1], y[2], y[3]);
    p.tau = tau_(t);
    p.quad = cs_->has_quad() ? quad_(t) : cplx(0.0);
    return p;
}

std::vector<double> AuxTrajectory::report_grid(std::size_t uniform) const {
    std::vector<double> g = traj_->times();
    const double t0 = traj_->t0(), t1 = traj_->t1();
    for (std::size_t i = 0; i < uniform; ++i)
        g.push_back(uniform == 1 ? t0 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(uniform - 1));
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end(), [](double a, double b) { return std::abs(a - b) < 1e-13; }), g.end());
    return g;
}

AuxTrajectory solve_aux(const ConstraintSet& cs, const AuxInitial& ics, Window window, const Tolerances& tol) {
    const bool real_mode = cs.spec().field == FieldMode::Real;
    for (cplx z : {ics.sigma, ics.sigma_t, ics.gamma, ics.gamma_t})
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw PreconditionError("initial conditions must be finite");
    if (real_mode) {
        for (cplx z : {ics.sigma, ics.sigma_t, ics.gamma, ics.gamma_t})
            if (z.imag() != 0.0) throw PreconditionError("initial conditions must be real in real field mode");
        if (!(ics.sigma.real() > 0.0)) throw PreconditionError("sigma must be positive");
    } else if (ics.sigma == cplx(0.0)) {
        throw PreconditionError("sigma must be nonzero");
    }

    auto shared = std::make_shared<const ConstraintSet>(cs);
    OdeSystem<cplx> sys;
    sys.dimension = 4;
    const ConstraintSet* c = shared.get();
    sys.rhs = [c](double t, const cplx* y, cplx* dy) {
        AuxPoint p = c->local(t, y[0], y[1], y[2], y[3]);
        dy[0] = y[1];
        dy[1] = p.sigma_tt;
        dy[2] = y[3];
        dy[3] = p.gamma_tt;
    };
    StateGuard<cplx> guard;
    if (real_mode) {
        guard = [](double, const std::vector<cplx>& y) -> std::optional<std::string> {
            if (!(y[0].real() > 0.0)) return "sigma must stay positive";
            return std::nullopt;
        };
    }
    auto traj = integrate<cplx>(sys, {ics.sigma, ics.sigma_t, ics.gamma, ics.gamma_t}, window, tol, guard);
    return AuxTrajectory(shared, std::move(traj));
}

AlgebraElement hamiltonian_at(const AuxTrajectory& aux, double t) {
    AuxPoint p = aux.at(t);
    if (aux.spec().field == FieldMode::Real && !(p.sigma.real() > 0.0)) throw DomainError("sigma <= 0");
    return aux.constraints().target_hamiltonian(p);
}

TransformValue evaluate_transform(const AuxTrajectory& aux, double t, double x) {
    AuxPoint p = aux.at(t);
    const auto& cs = aux.constraints();
    auto ph = cs.phase(p.values());
    cplx chi = (x + p.gamma) * std::pow(p.sigma, -cs.spec().s);
    cplx Phi = ph[0] * x * x + ph[1] * x + ph[2];
    cplx A = std::exp(I * Phi / cs.spec().hbar);
    return {chi, p.tau, A};
}

cplx map_reference_solution(const AuxTrajectory& aux, const ReferenceSolution& psi, double t, double x) {
    TransformValue tv = evaluate_transform(aux, t, x);
    if (tv.A == cplx(0.0)) throw DomainError("A(x,t) = 0");
    return psi(tv.chi, tv.tau) / tv.A;
}

}  // namespace ptinv
