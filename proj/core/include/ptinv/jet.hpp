#pragma once

// First-order forward-mode jets in t. Used to push d/dt through the closed
// coefficient formulas instead of expanding derivatives by hand.

#include <cmath>
#include <complex>
#include <type_traits>

namespace ptinv {

template <class T>
struct TimeJet {
    T v{};
    T d{};

    TimeJet() = default;
    TimeJet(T value) : v(value), d(T{}) {}  // NOLINT: constants promote implicitly
    TimeJet(T value, T deriv) : v(value), d(deriv) {}

    TimeJet operator-() const { return {-v, -d}; }
    TimeJet& operator+=(const TimeJet& o) { v += o.v; d += o.d; return *this; }
    TimeJet& operator-=(const TimeJet& o) { v -= o.v; d -= o.d; return *this; }
    TimeJet& operator*=(const TimeJet& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
    TimeJet& operator/=(const TimeJet& o) {
        T q = v / o.v;
        d = (d - q * o.d) / o.v;
        v = q;
        return *this;
    }
};

template <class T> TimeJet<T> operator+(TimeJet<T> a, const TimeJet<T>& b) { return a += b; }
template <class T> TimeJet<T> operator-(TimeJet<T> a, const TimeJet<T>& b) { return a -= b; }
template <class T> TimeJet<T> operator*(TimeJet<T> a, const TimeJet<T>& b) { return a *= b; }
template <class T> TimeJet<T> operator/(TimeJet<T> a, const TimeJet<T>& b) { return a /= b; }

// Scalar operands are taken in non-deduced context so a double mixes with
// complex jets without explicit casts.
template <class T> using Scalar_t = std::type_identity_t<T>;

template <class T> TimeJet<T> operator+(TimeJet<T> a, const Scalar_t<T>& b) { a.v += b; return a; }
template <class T> TimeJet<T> operator+(const Scalar_t<T>& b, TimeJet<T> a) { a.v += b; return a; }
template <class T> TimeJet<T> operator-(TimeJet<T> a, const Scalar_t<T>& b) { a.v -= b; return a; }
template <class T> TimeJet<T> operator-(const Scalar_t<T>& b, const TimeJet<T>& a) { return {b - a.v, -a.d}; }
template <class T> TimeJet<T> operator*(TimeJet<T> a, const Scalar_t<T>& b) { a.v *= b; a.d *= b; return a; }
template <class T> TimeJet<T> operator*(const Scalar_t<T>& b, TimeJet<T> a) { a.v *= b; a.d *= b; return a; }
template <class T> TimeJet<T> operator/(TimeJet<T> a, const Scalar_t<T>& b) { a.v /= b; a.d /= b; return a; }
template <class T> TimeJet<T> operator/(const Scalar_t<T>& b, const TimeJet<T>& a) {
    T q = b / a.v;
    return {q, -q * a.d / a.v};
}

// x^p for real exponent p; x is assumed on the principal branch (x > 0 in real mode).
template <class T> TimeJet<T> pow(const TimeJet<T>& a, double p) {
    using std::pow;
    if (p == 0.0) return {T(1), T(0)};
    T vp = pow(a.v, p);
    T vpm1 = pow(a.v, p - 1.0);
    return {vp, T(p) * vpm1 * a.d};
}

template <class T> TimeJet<T> log(const TimeJet<T>& a) {
    using std::log;
    return {log(a.v), a.d / a.v};
}

template <class T> TimeJet<T> exp(const TimeJet<T>& a) {
    using std::exp;
    T e = exp(a.v);
    return {e, e * a.d};
}

template <class T> TimeJet<T> conj(const TimeJet<T>& a) {
    return {std::conj(a.v), std::conj(a.d)};
}

inline double value_of(double x) { return x; }
inline std::complex<double> value_of(std::complex<double> x) { return x; }
template <class T> T value_of(const TimeJet<T>& a) { return a.v; }

// Promotes a scalar into the jet/scalar type J.
template <class J, class S> J lift(S s) { return J(s); }

}  // namespace ptinv
