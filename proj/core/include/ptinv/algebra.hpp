#pragma once

// The six-dimensional operator algebra spanned by {p^2, p, {x,p}, x^2, x, 1}
// with [x,p] = i hbar, and the group elements generated by it.

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ptinv {

using cplx = std::complex<double>;

enum class Basis : std::size_t { P2 = 0, P = 1, XP = 2, X2 = 3, X = 4, One = 5 };
inline constexpr std::size_t kBasisSize = 6;

std::string basis_name(Basis b);

class AlgebraElement {
public:
    using Coeffs = std::array<cplx, kBasisSize>;

    AlgebraElement() { c_.fill(cplx(0.0)); }
    explicit AlgebraElement(const Coeffs& c) : c_(c) {}
    static AlgebraElement unit(Basis b, cplx coeff = 1.0);

    cplx operator[](Basis b) const { return c_[static_cast<std::size_t>(b)]; }
    cplx operator[](std::size_t i) const { return c_[i]; }
    const Coeffs& coeffs() const { return c_; }

    // Returns a copy with one coefficient replaced.
    AlgebraElement with(Basis b, cplx v) const;

    bool is_finite() const;
    double max_abs() const;
    // max |Im c_k|; zero iff the element is Hermitian.
    double hermiticity_defect() const;

    AlgebraElement& operator+=(const AlgebraElement& o);
    AlgebraElement& operator-=(const AlgebraElement& o);
    AlgebraElement& operator*=(cplx s);

    friend bool operator==(const AlgebraElement&, const AlgebraElement&) = default;

private:
    Coeffs c_;
};

AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b);
AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b);
AlgebraElement operator-(const AlgebraElement& a);
AlgebraElement operator*(cplx s, AlgebraElement a);
AlgebraElement operator*(AlgebraElement a, cplx s);

// max_k |a_k - b_k|
double max_abs_diff(const AlgebraElement& a, const AlgebraElement& b);

AlgebraElement dagger(const AlgebraElement& a);

struct GroupFactor {
    Basis generator;
    cplx parameter;
    std::optional<cplx> rate;

    GroupFactor(Basis g, cplx theta, std::optional<cplx> theta_dot = std::nullopt);
};

// Product exp(theta_1 G_1) exp(theta_2 G_2) ... in the listed order.
class GroupElement {
public:
    GroupElement() = default;
    explicit GroupElement(std::vector<GroupFactor> factors) : factors_(std::move(factors)) {}

    const std::vector<GroupFactor>& factors() const { return factors_; }
    bool empty() const { return factors_.empty(); }

    GroupElement inverse() const;
    // Reversed order, conjugated parameters.
    GroupElement dagger() const;
    GroupElement then(const GroupElement& right) const;  // this * right
    // Merges adjacent factors with the same generator and drops zero parameters.
    GroupElement simplified() const;
    bool all_parameters_real(double tol = 0.0) const;

private:
    std::vector<GroupFactor> factors_;
};

using AdMatrix = Eigen::Matrix<cplx, 6, 6>;

class OperatorAlgebra {
public:
    explicit OperatorAlgebra(double hbar = 1.0);

    double hbar() const { return hbar_; }

    AlgebraElement commutator(const AlgebraElement& a, const AlgebraElement& b) const;

    // Product of two elements of degree <= 1 (p, x, 1 only), which is again in
    // the algebra. Throws PreconditionError on quadratic input.
    AlgebraElement product_linear(const AlgebraElement& a, const AlgebraElement& b) const;

    // Matrix of B -> [a, B] acting on coefficient vectors.
    AdMatrix ad_matrix(const AlgebraElement& a) const;

    // exp(theta G) B exp(-theta G)
    AlgebraElement adjoint_factor(const GroupFactor& f, const AlgebraElement& b) const;
    AdMatrix adjoint_factor_matrix(const GroupFactor& f) const;
    // g B g^{-1}
    AlgebraElement adjoint_action(const GroupElement& g, const AlgebraElement& b) const;
    AdMatrix adjoint_matrix(const GroupElement& g) const;

    // g_t g^{-1}; every factor needs a rate.
    AlgebraElement flow_derivative(const GroupElement& g) const;

private:
    double hbar_;
};

// Structure constants with hbar factored out: [e_i, e_j] = i hbar sum_k C(i,j,k) e_k.
double structure_constant(std::size_t i, std::size_t j, std::size_t k);

}  // namespace ptinv
