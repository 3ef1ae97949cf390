#include <algorithm>
#include <cmath>

#include "ptinv/auxode.hpp"
#include "ptinv/errors.hpp"

namespace ptinv {

using cplx = std::complex<double>;

double PinneySpec::constraint_defect() const {
    cplx w = wronskian();
    return std::abs(C * C - (A * B - omega * omega / (w * w)));
}

void PinneySpec::validate(double tol) const {
    if (!kappa) throw PreconditionError("Pinney spec needs a kappa function");
    cplx w = wronskian();
    if (std::abs(w) < 1e-14) throw PreconditionError("fundamental solutions are linearly dependent (W = 0)");
    double scale = std::max({1.0, std::abs(A * B), std::abs(C * C), omega * omega / std::norm(w)});
    if (constraint_defect() > tol * scale)
        throw PreconditionError("Pinney constants violate C^2 = AB - omega^2/W^2");
}

PinneySolution::Point PinneySolution::eval(double t) const {
    auto s = fund_.state_at(t);
    const cplx u = s[0], up = s[1], v = s[2], vp = s[3];
    const cplx k = spec_.kappa(t);
    const cplx upp = -k * u, vpp = -k * v;
    const cplx& A = spec_.A;
    const cplx& B = spec_.B;
    const cplx& C = spec_.C;
    cplx S = A * u * u + B * v * v + 2.0 * C * u * v;
    cplx S1 = 2.0 * (A * u * up + B * v * vp + C * (up * v + u * vp));
    cplx S2 = 2.0 * (A * (up * up + u * upp) + B * (vp * vp + v * vpp) + C * (upp * v + 2.0 * up * vp + u * vpp));

    const auto& ts = fund_.times();
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t k0 = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
    k0 = std::min(k0, node_sigma_.size() - 1);
    cplx sig = std::sqrt(S);
    if (std::abs(-sig - node_sigma_[k0]) < std::abs(sig - node_sigma_[k0])) sig = -sig;

    cplx st = S1 / (2.0 * sig);
    cplx stt = (0.5 * S2 - st * st) / sig;
    return {sig, st, stt};
}

cplx PinneySolution::sigma(double t) const { return eval(t).sigma; }
cplx PinneySolution::sigma_t(double t) const { return eval(t).sigma_t; }
cplx PinneySolution::sigma_tt(double t) const { return eval(t).sigma_tt; }

cplx PinneySolution::wronskian_at(double t) const {
    auto s = fund_.state_at(t);
    return s[0] * s[3] - s[1] * s[2];
}

PinneySolution pinney_sigma(const PinneySpec& spec, Window window, const Tolerances& tol) {
    spec.validate();

    OdeSystem<cplx> sys;
    sys.dimension = 4;
    auto kappa = spec.kappa;
    sys.rhs = [kappa](double t, const cplx* y, cplx* dy) {
        cplx k = kappa(t);
        dy[0] = y[1];
        dy[1] = -k * y[0];
        dy[2] = y[3];
        dy[3] = -k * y[2];
    };

    PinneySolution sol;
    sol.spec_ = spec;
    sol.fund_ = integrate<cplx>(sys, {spec.u0, spec.u0_t, spec.v0, spec.v0_t}, window, tol);

    const auto& ts = sol.fund_.times();
    sol.node_sigma_.reserve(ts.size());
    cplx prev;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        auto s = sol.fund_.sample(k);
        cplx S = spec.A * s[0] * s[0] + spec.B * s[2] * s[2] + 2.0 * spec.C * s[0] * s[2];
        if (!spec.complex_mode && (!(S.real() > 0.0) || std::abs(S.imag()) > 1e-9 * std::abs(S)))
            throw DomainError("sigma^2 <= 0 in real mode at t = " + std::to_string(ts[k]));
        cplx sig = std::sqrt(S);
        if (k > 0 && std::abs(-sig - prev) < std::abs(sig - prev)) sig = -sig;
        sol.node_sigma_.push_back(sig);
        prev = sig;
    }
    return sol;
}

}  // namespace ptinv
