#include "ptinv/auxode.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "ptinv/errors.hpp"

namespace ptinv {
namespace {

// Dormand-Prince 5(4) tableau with Shampine's dense output.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double mag(double x) { return std::abs(x); }
double mag(const std::complex<double>& z) { return std::abs(z); }
bool finite(double x) { return std::isfinite(x); }
bool finite(const std::complex<double>& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

template <class S>
bool all_finite(const std::vector<S>& v) {
    return std::all_of(v.begin(), v.end(), [](const S& s) { return finite(s); });
}

template <class S>
double rms_norm(const std::vector<S>& v, const std::vector<S>& y, const Tolerances& tol) {
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double sc = tol.abs_tol + tol.rel_tol * mag(y[i]);
        double q = mag(v[i]) / sc;
        sum += q * q;
    }
    return std::sqrt(sum / static_cast<double>(v.size()));
}

// Hairer's starting step heuristic.
template <class S>
double initial_step(const OdeSystem<S>& sys, double t0, const std::vector<S>& y0,
                    const std::vector<S>& f0, const Tolerances& tol, double span) {
    double dn0 = rms_norm(y0, y0, tol);
    double dn1 = rms_norm(f0, y0, tol);
    double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
    h0 = std::min(h0, span);
    std::vector<S> y1(y0.size()), f1(y0.size());
    for (std::size_t i = 0; i < y0.size(); ++i) y1[i] = y0[i] + h0 * f0[i];
    sys.rhs(t0 + h0, y1.data(), f1.data());
    if (!all_finite(f1)) return h0 * 1e-3;
    std::vector<S> df(y0.size());
    for (std::size_t i = 0; i < y0.size(); ++i) df[i] = f1[i] - f0[i];
    double dn2 = rms_norm(df, y0, tol) / h0;
    double big = std::max(dn1, dn2);
    double h1 = big <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / big, 0.2);
    return std::min({100.0 * h0, h1, span});
}

}  // namespace

template <class S>
std::size_t Trajectory<S>::locate(double t) const {
    if (!covers(t)) throw PreconditionError("time " + std::to_string(t) + " outside trajectory window");
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - t_.begin());
    if (k == 0) return 0;
    return std::min(k - 1, steps() - 1);
}

template <class S>
bool Trajectory<S>::covers(double t) const {
    double slack = 1e-12 * std::max(1.0, std::abs(t_.back()));
    return t >= t_.front() - slack && t <= t_.back() + slack;
}

template <class S>
std::vector<S> Trajectory<S>::sample(std::size_t k) const {
    return std::vector<S>(y_.begin() + static_cast<std::ptrdiff_t>(k * dim_),
                          y_.begin() + static_cast<std::ptrdiff_t>((k + 1) * dim_));
}

template <class S>
std::vector<S> Trajectory<S>::state_at(double t) const {
    std::size_t k = locate(t);
    double h = t_[k + 1] - t_[k];
    double th = (t - t_[k]) / h;
    double th1 = 1.0 - th;
    const S* r = dense_.data() + k * 5 * dim_;
    std::vector<S> out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        const S r1 = r[i], r2 = r[dim_ + i], r3 = r[2 * dim_ + i], r4 = r[3 * dim_ + i],
                r5 = r[4 * dim_ + i];
        out[i] = r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
    }
    return out;
}

template <class S>
std::vector<S> Trajectory<S>::derivative_at(double t) const {
    std::size_t k = locate(t);
    double h = t_[k + 1] - t_[k];
    double th = (t - t_[k]) / h;
    const S* r = dense_.data() + k * 5 * dim_;
    std::vector<S> out(dim_);
    double w3 = 1.0 - 2.0 * th;
    double w4 = th * (2.0 - 3.0 * th);
    double w5 = 2.0 * th * (1.0 - th) * (1.0 - 2.0 * th);
    for (std::size_t i = 0; i < dim_; ++i) {
        out[i] = (r[dim_ + i] + w3 * r[2 * dim_ + i] + w4 * r[3 * dim_ + i] + w5 * r[4 * dim_ + i]) / h;
    }
    return out;
}

template <class S>
Trajectory<S> integrate(const OdeSystem<S>& sys, std::vector<S> y, Window window, const Tolerances& tol,
                        const StateGuard<S>& guard) {
    const std::size_t n = sys.dimension;
    if (n == 0 || y.size() != n) throw PreconditionError("initial state has wrong dimension");
    if (!all_finite(y)) throw PreconditionError("initial state is not finite");
    if (!(tol.abs_tol > 0.0) || !(tol.rel_tol > 0.0)) throw PreconditionError("tolerances must be positive");
    if (!(window.t1 > window.t0)) throw PreconditionError("integration window must have t1 > t0");

    Trajectory<S> tr;
    tr.dim_ = n;
    tr.t_.push_back(window.t0);
    tr.y_.insert(tr.y_.end(), y.begin(), y.end());

    double t = window.t0;
    if (guard) {
        if (auto msg = guard(t, y)) throw IntegrationError(*msg, t);
    }

    std::vector<S> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ys(n), y1(n), err(n);
    sys.rhs(t, y.data(), k1.data());
    if (!all_finite(k1)) throw IntegrationError("non-finite right-hand side", t);

    const double span = window.t1 - window.t0;
    double h = tol.initial_step > 0.0 ? tol.initial_step : initial_step(sys, t, y, k1, tol, span);
    const double hmax = tol.max_step > 0.0 ? tol.max_step : span;
    bool last_reject_nonfinite = false;
    bool rejected_prev = false;

    for (std::size_t step = 0;; ++step) {
        if (step >= tol.max_steps) throw IntegrationError("step budget exhausted", t);
        double hmin = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
        if (h < hmin) {
            throw IntegrationError(last_reject_nonfinite ? "non-finite right-hand side"
                                                         : "step size underflow",
                                   t);
        }
        h = std::min(h, hmax);
        bool final_step = false;
        if (t + h >= window.t1 || t + 1.01 * h >= window.t1) {
            h = window.t1 - t;
            final_step = true;
        }

        auto stage = [&](std::vector<S>& out, double c, auto&& combine) {
            for (std::size_t i = 0; i < n; ++i) ys[i] = y[i] + h * combine(i);
            sys.rhs(t + c * h, ys.data(), out.data());
        };
        stage(k2, c2, [&](std::size_t i) { return a21 * k1[i]; });
        stage(k3, c3, [&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; });
        stage(k4, c4, [&](std::size_t i) { return a41 * k1[i] + a42 * k2[i] + a43 * k3[i]; });
        stage(k5, c5, [&](std::size_t i) { return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]; });
        stage(k6, 1.0, [&](std::size_t i) {
            return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i];
        });
        for (std::size_t i = 0; i < n; ++i)
            y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        double tn = final_step ? window.t1 : t + h;
        sys.rhs(tn, y1.data(), k7.data());

        bool ok = all_finite(k2) && all_finite(k3) && all_finite(k4) && all_finite(k5) &&
                  all_finite(k6) && all_finite(y1) && all_finite(k7);
        if (!ok) {
            last_reject_nonfinite = true;
            ++tr.rejected_;
            h *= 0.25;
            rejected_prev = true;
            continue;
        }

        double enorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            S e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            double sc = tol.abs_tol + tol.rel_tol * std::max(mag(y[i]), mag(y1[i]));
            double q = mag(e) / sc;
            enorm += q * q;
        }
        enorm = std::sqrt(enorm / static_cast<double>(n));

        if (enorm > 1.0) {
            last_reject_nonfinite = false;
            ++tr.rejected_;
            h *= std::max(0.2, 0.9 * std::pow(enorm, -0.2));
            rejected_prev = true;
            continue;
        }
        last_reject_nonfinite = false;

        if (guard) {
            if (auto msg = guard(tn, y1)) throw IntegrationError(*msg, tn);
        }

        const std::size_t base = tr.dense_.size();
        tr.dense_.resize(base + 5 * n);
        S* r = tr.dense_.data() + base;
        for (std::size_t i = 0; i < n; ++i) {
            S r2 = y1[i] - y[i];
            S r3 = h * k1[i] - r2;
            r[i] = y[i];
            r[n + i] = r2;
            r[2 * n + i] = r3;
            r[3 * n + i] = r2 - h * k7[i] - r3;
            r[4 * n + i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }

        t = tn;
        y.swap(y1);
        k1.swap(k7);
        tr.t_.push_back(t);
        tr.y_.insert(tr.y_.end(), y.begin(), y.end());
        if (final_step) break;

        double fac = enorm == 0.0 ? 5.0 : 0.9 * std::pow(enorm, -0.2);
        fac = std::clamp(fac, 0.2, rejected_prev ? 1.0 : 5.0);
        h *= fac;
        rejected_prev = false;
    }
    return tr;
}

template class Trajectory<double>;
template class Trajectory<std::complex<double>>;
template Trajectory<double> integrate(const OdeSystem<double>&, std::vector<double>, Window,
                                      const Tolerances&, const StateGuard<double>&);
template Trajectory<std::complex<double>> integrate(const OdeSystem<std::complex<double>>&,
                                                    std::vector<std::complex<double>>, Window,
                                                    const Tolerances&,
                                                    const StateGuard<std::complex<double>>&);

}  // namespace ptinv
