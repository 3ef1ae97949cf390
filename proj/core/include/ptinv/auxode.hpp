#pragma once

// Adaptive Dormand-Prince 5(4) integration with dense output, for real or
// complex state vectors.

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ptinv {

struct Window {
    double t0 = 0.0;
    double t1 = 1.0;
};

struct Tolerances {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double initial_step = 0.0;  // 0: automatic
    double max_step = 0.0;      // 0: unbounded
    std::size_t max_steps = 5'000'000;
};

template <class S>
struct OdeSystem {
    std::size_t dimension = 0;
    std::function<void(double t, const S* y, S* dydt)> rhs;
};

// Called on every accepted state; a returned message aborts the integration.
template <class S>
using StateGuard = std::function<std::optional<std::string>(double t, const std::vector<S>& y)>;

template <class S>
class Trajectory {
public:
    std::size_t dimension() const { return dim_; }
    double t0() const { return t_.front(); }
    double t1() const { return t_.back(); }
    // Accepted step endpoints, strictly increasing, first = t0, last = t1.
    const std::vector<double>& times() const { return t_; }
    std::size_t steps() const { return t_.size() - 1; }
    std::size_t rejected_steps() const { return rejected_; }

    std::vector<S> sample(std::size_t k) const;
    std::vector<S> state_at(double t) const;
    std::vector<S> derivative_at(double t) const;
    bool covers(double t) const;

private:
    template <class T>
    friend Trajectory<T> integrate(const OdeSystem<T>&, std::vector<T>, Window, const Tolerances&,
                                   const StateGuard<T>&);

    std::size_t locate(double t) const;

    std::size_t dim_ = 0;
    std::size_t rejected_ = 0;
    std::vector<double> t_;
    std::vector<S> y_;      // (steps+1) * dim
    std::vector<S> dense_;  // steps * 5 * dim
};

template <class S>
Trajectory<S> integrate(const OdeSystem<S>& system, std::vector<S> y0, Window window,
                        const Tolerances& tol = {}, const StateGuard<S>& guard = {});

// Ermakov-Pinney solutions sigma'' + kappa sigma = omega^2 / sigma^3 built from
// two fundamental solutions of u'' + kappa u = 0.
struct PinneySpec {
    std::function<std::complex<double>(double)> kappa;
    double omega = 1.0;
    std::complex<double> A = 1.0, B = 1.0, C = 0.0;
    std::complex<double> u0 = 1.0, u0_t = 0.0;
    std::complex<double> v0 = 0.0, v0_t = 1.0;
    bool complex_mode = false;

    std::complex<double> wronskian() const { return u0 * v0_t - u0_t * v0; }
    // |C^2 - (AB - omega^2/W^2)|
    double constraint_defect() const;
    // Throws PreconditionError on W = 0 or a violated constraint.
    void validate(double tol = 1e-12) const;
};

class PinneySolution {
public:
    using cplx = std::complex<double>;

    const Trajectory<cplx>& fundamentals() const { return fund_; }
    const std::vector<double>& times() const { return fund_.times(); }

    cplx sigma(double t) const;
    cplx sigma_t(double t) const;
    // From u'' = -kappa u, not from the EP equation itself.
    cplx sigma_tt(double t) const;
    cplx wronskian_at(double t) const;

private:
    friend PinneySolution pinney_sigma(const PinneySpec&, Window, const Tolerances&);

    struct Point {
        cplx sigma, sigma_t, sigma_tt;
    };
    Point eval(double t) const;

    PinneySpec spec_;
    Trajectory<cplx> fund_;
    std::vector<cplx> node_sigma_;  // branch-tracked sigma at the accepted steps
};

PinneySolution pinney_sigma(const PinneySpec& spec, Window window, const Tolerances& tol = {});

}  // namespace ptinv
