#include "ptinv/algebra.hpp"

#include <cmath>

#include "ptinv/errors.hpp"

namespace ptinv {
namespace {

constexpr std::size_t N = kBasisSize;

struct Table {
    double c[N][N][N] = {};

    constexpr void set(Basis a, Basis b, Basis k, double v) {
        auto i = static_cast<std::size_t>(a);
        auto j = static_cast<std::size_t>(b);
        auto l = static_cast<std::size_t>(k);
        c[i][j][l] = v;
        c[j][i][l] = -v;
    }
};

// Derived once from [x,p] = i hbar with {x,p} = xp + px; entries are the
// coefficients of i hbar.
constexpr Table make_table() {
    Table t;
    t.set(Basis::P2, Basis::XP, Basis::P2, -4.0);
    t.set(Basis::P2, Basis::X2, Basis::XP, -2.0);
    t.set(Basis::P2, Basis::X, Basis::P, -2.0);
    t.set(Basis::P, Basis::XP, Basis::P, -2.0);
    t.set(Basis::P, Basis::X2, Basis::X, -2.0);
    t.set(Basis::P, Basis::X, Basis::One, -1.0);
    t.set(Basis::XP, Basis::X2, Basis::X2, -4.0);
    t.set(Basis::XP, Basis::X, Basis::X, -2.0);
    return t;
}

constexpr Table kTable = make_table();

AdMatrix expm(const AdMatrix& a) {
    double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    AdMatrix s = a / std::ldexp(1.0, squarings);

    AdMatrix result = AdMatrix::Identity();
    AdMatrix term = AdMatrix::Identity();
    for (int k = 1; k < 40; ++k) {
        term = term * s / static_cast<double>(k);
        double tn = term.cwiseAbs().maxCoeff();
        if (tn == 0.0) break;  // nilpotent generator: series terminated exactly
        result += term;
        if (tn < 1e-300 || tn < 1e-18 * result.cwiseAbs().maxCoeff()) break;
    }
    for (int k = 0; k < squarings; ++k) result = result * result;
    return result;
}

AlgebraElement apply_ad(const AdMatrix& m, const AlgebraElement& b) {
    AlgebraElement::Coeffs out{};
    for (std::size_t i = 0; i < N; ++i) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < N; ++j) acc += m(i, j) * b[j];
        out[i] = acc;
    }
    return AlgebraElement(out);
}

}  // namespace

std::string basis_name(Basis b) {
    switch (b) {
        case Basis::P2: return "p^2";
        case Basis::P: return "p";
        case Basis::XP: return "{x,p}";
        case Basis::X2: return "x^2";
        case Basis::X: return "x";
        case Basis::One: return "1";
    }
    return "?";
}

double structure_constant(std::size_t i, std::size_t j, std::size_t k) {
    return kTable.c[i][j][k];
}

AlgebraElement AlgebraElement::unit(Basis b, cplx coeff) {
    AlgebraElement e;
    e.c_[static_cast<std::size_t>(b)] = coeff;
    return e;
}

AlgebraElement AlgebraElement::with(Basis b, cplx v) const {
    AlgebraElement e(*this);
    e.c_[static_cast<std::size_t>(b)] = v;
    return e;
}

bool AlgebraElement::is_finite() const {
    for (auto& z : c_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

double AlgebraElement::max_abs() const {
    double m = 0.0;
    for (auto& z : c_) m = std::max(m, std::abs(z));
    return m;
}

double AlgebraElement::hermiticity_defect() const {
    double m = 0.0;
    for (auto& z : c_) m = std::max(m, std::abs(z.imag()));
    return m;
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& o) {
    for (std::size_t i = 0; i < N; ++i) c_[i] += o.c_[i];
    return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& o) {
    for (std::size_t i = 0; i < N; ++i) c_[i] -= o.c_[i];
    return *this;
}

AlgebraElement& AlgebraElement::operator*=(cplx s) {
    for (auto& z : c_) z *= s;
    return *this;
}

AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
AlgebraElement operator-(const AlgebraElement& a) { return cplx(-1.0) * a; }
AlgebraElement operator*(cplx s, AlgebraElement a) { return a *= s; }
AlgebraElement operator*(AlgebraElement a, cplx s) { return a *= s; }

double max_abs_diff(const AlgebraElement& a, const AlgebraElement& b) {
    return (a - b).max_abs();
}

AlgebraElement dagger(const AlgebraElement& a) {
    AlgebraElement::Coeffs c = a.coeffs();
    for (auto& z : c) z = std::conj(z);
    return AlgebraElement(c);
}

GroupFactor::GroupFactor(Basis g, cplx theta, std::optional<cplx> theta_dot)
    : generator(g), parameter(theta), rate(theta_dot) {
    if (g == Basis::One) throw PreconditionError("group factor generator cannot be the identity");
}

GroupElement GroupElement::inverse() const {
    std::vector<GroupFactor> out;
    out.reserve(factors_.size());
    for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
        std::optional<cplx> r;
        if (it->rate) r = -*it->rate;
        out.emplace_back(it->generator, -it->parameter, r);
    }
    return GroupElement(std::move(out));
}

GroupElement GroupElement::dagger() const {
    std::vector<GroupFactor> out;
    out.reserve(factors_.size());
    for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
        std::optional<cplx> r;
        if (it->rate) r = std::conj(*it->rate);
        out.emplace_back(it->generator, std::conj(it->parameter), r);
    }
    return GroupElement(std::move(out));
}

GroupElement GroupElement::then(const GroupElement& right) const {
    std::vector<GroupFactor> out = factors_;
    out.insert(out.end(), right.factors_.begin(), right.factors_.end());
    return GroupElement(std::move(out));
}

GroupElement GroupElement::simplified() const {
    std::vector<GroupFactor> out;
    for (const auto& f : factors_) {
        if (!out.empty() && out.back().generator == f.generator) {
            out.back().parameter += f.parameter;
            if (out.back().rate && f.rate)
                *out.back().rate += *f.rate;
            else
                out.back().rate.reset();
        } else {
            out.push_back(f);
        }
        if (out.back().parameter == cplx(0.0) &&
            (!out.back().rate || *out.back().rate == cplx(0.0)))
            out.pop_back();
    }
    return GroupElement(std::move(out));
}

bool GroupElement::all_parameters_real(double tol) const {
    for (const auto& f : factors_)
        if (std::abs(f.parameter.imag()) > tol) return false;
    return true;
}

OperatorAlgebra::OperatorAlgebra(double hbar) : hbar_(hbar) {
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw PreconditionError("hbar must be positive");
}

AlgebraElement OperatorAlgebra::commutator(const AlgebraElement& a, const AlgebraElement& b) const {
    // Summed over i < j with the antisymmetrized product, so swapping a and b
    // negates every term and [a,b] + [b,a] is exactly zero.
    AlgebraElement::Coeffs out{};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) {
            cplx w = a[i] * b[j] - a[j] * b[i];
            if (w == cplx(0.0)) continue;
            for (std::size_t k = 0; k < N; ++k) {
                double c = kTable.c[i][j][k];
                if (c != 0.0) out[k] += c * w;
            }
        }
    cplx ih(0.0, hbar_);
    for (auto& z : out) z *= ih;
    return AlgebraElement(out);
}

AlgebraElement OperatorAlgebra::product_linear(const AlgebraElement& a, const AlgebraElement& b) const {
    for (Basis q : {Basis::P2, Basis::XP, Basis::X2})
        if (a[q] != cplx(0.0) || b[q] != cplx(0.0))
            throw PreconditionError("product_linear requires elements of degree <= 1");
    cplx ap = a[Basis::P], ax = a[Basis::X], a1 = a[Basis::One];
    cplx bp = b[Basis::P], bx = b[Basis::X], b1 = b[Basis::One];
    AlgebraElement::Coeffs c{};
    c[0] = ap * bp;
    c[1] = ap * b1 + a1 * bp;
    c[2] = 0.5 * (ap * bx + ax * bp);
    c[3] = ax * bx;
    c[4] = ax * b1 + a1 * bx;
    // Weyl product correction (i hbar / 2) {a, b}_Poisson
    c[5] = a1 * b1 + cplx(0.0, 0.5 * hbar_) * (ax * bp - ap * bx);
    return AlgebraElement(c);
}

AdMatrix OperatorAlgebra::ad_matrix(const AlgebraElement& a) const {
    AdMatrix m = AdMatrix::Zero();
    cplx ih(0.0, hbar_);
    for (std::size_t i = 0; i < N; ++i) {
        if (a[i] == cplx(0.0)) continue;
        for (std::size_t j = 0; j < N; ++j)
            for (std::size_t k = 0; k < N; ++k) {
                double c = kTable.c[i][j][k];
                if (c != 0.0) m(k, j) += ih * c * a[i];
            }
    }
    return m;
}

AdMatrix OperatorAlgebra::adjoint_factor_matrix(const GroupFactor& f) const {
    if (f.parameter == cplx(0.0)) return AdMatrix::Identity();
    return expm(ad_matrix(AlgebraElement::unit(f.generator, f.parameter)));
}

AlgebraElement OperatorAlgebra::adjoint_factor(const GroupFactor& f, const AlgebraElement& b) const {
    return apply_ad(adjoint_factor_matrix(f), b);
}

AdMatrix OperatorAlgebra::adjoint_matrix(const GroupElement& g) const {
    AdMatrix m = AdMatrix::Identity();
    for (const auto& f : g.factors()) m = m * adjoint_factor_matrix(f);
    return m;
}

AlgebraElement OperatorAlgebra::adjoint_action(const GroupElement& g, const AlgebraElement& b) const {
    AlgebraElement out = b;
    const auto& fs = g.factors();
    for (auto it = fs.rbegin(); it != fs.rend(); ++it) out = adjoint_factor(*it, out);
    return out;
}

AlgebraElement OperatorAlgebra::flow_derivative(const GroupElement& g) const {
    AlgebraElement sum;
    AdMatrix prefix = AdMatrix::Identity();
    for (const auto& f : g.factors()) {
        if (!f.rate) throw PreconditionError("flow_derivative: group factor without parameter rate");
        sum += apply_ad(prefix, AlgebraElement::unit(f.generator, *f.rate));
        prefix = prefix * adjoint_factor_matrix(f);
    }
    return sum;
}

}  // namespace ptinv
