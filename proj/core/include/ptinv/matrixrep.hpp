#pragma once

// Truncated Fock-basis images of algebra elements, used as an independent
// oracle for commutators, metric positivity and time evolution.

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "ptinv/algebra.hpp"
#include "ptinv/auxode.hpp"

namespace ptinv {

using DenseOperator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

// x = sqrt(hbar/2 m0 w0) (a + a^dag), p = i sqrt(hbar m0 w0 / 2) (a^dag - a).
struct MatrixBasis {
    std::size_t N = 128;
    std::size_t N_trust = 32;
    double m0 = 1.0;
    double omega0 = 1.0;
    double hbar = 1.0;

    // Throws PreconditionError unless N >= 8, N_trust <= N/2 and scales are positive.
    void validate() const;
    double length() const;  // sqrt(hbar / 2 m0 w0)
};

// Rows of a pentadiagonal matrix: band(i, k) is the entry at column i + k - 2.
using BandOperator = Eigen::Matrix<cplx, Eigen::Dynamic, 5>;

BandOperator materialize_band(const AlgebraElement& A, const MatrixBasis& basis);
// Exact images of the six basis operators (x^2 and p^2 are not squares of the truncated x, p).
DenseOperator materialize(const AlgebraElement& A, const MatrixBasis& basis);

DenseOperator trusted_block(const DenseOperator& M, const MatrixBasis& basis);
double max_abs(const DenseOperator& M);

// || P ([A, B] - mat(commutator(A, B))) P ||_max
double commutator_check(const AlgebraElement& A, const AlgebraElement& B, const MatrixBasis& basis);

// Action of exp(theta G) for real-parameter group elements, by Taylor series on
// substeps with |theta| ||G|| <= 1 applied to vectors. Rounding then scales with
// the vectors involved rather than with exp(|theta| spectral radius).
class GroupExponentiator {
public:
    explicit GroupExponentiator(const MatrixBasis& basis);

    // Throws TruncationOverflow when |theta| times the generator's spectral
    // radius exceeds log(DBL_MAX); PreconditionError on complex parameters.
    DenseOperator apply_block(const GroupElement& g, DenseOperator block) const;
    // The overflow and real-parameter checks alone.
    void check(const GroupElement& g) const;
    StateVector apply(const GroupElement& g, const StateVector& v) const;
    DenseOperator operator()(const GroupElement& g) const;
    const MatrixBasis& basis() const { return basis_; }

private:
    MatrixBasis basis_;
    std::array<BandOperator, 5> generators_;
    std::array<double, 5> radius_{};
    std::array<double, 5> norm_{};
};

// Smallest eigenvalue of the symmetrized trusted block of rho. A palindromic
// rho (metric() output) is treated as eta^dag eta and the result is
// sigma_min(eta P)^2, which resolves small eigenvalues far better than an
// eigen-solve of the formed block.
double metric_spectrum(const GroupElement& rho, const MatrixBasis& basis);
double metric_spectrum(const GroupElement& rho, const GroupExponentiator& ex);

// P (mat(dI) + [mat(I), mat(H)] / (i hbar)) P
DenseOperator matrix_lr_residual(const AlgebraElement& I, const AlgebraElement& dI, const AlgebraElement& H,
                                 const MatrixBasis& basis);

struct PropagationOptions {
    double dt = 1e-3;               // largest Crank-Nicolson step
    double leak_tolerance = 1e-6;   // population allowed in the top quarter of the basis
};

struct PropagationReport {
    std::vector<double> times;
    std::vector<double> metric_norm;   // <phi|rho(t)|phi>
    std::vector<double> plain_norm_H;  // ||phi||^2
    std::vector<double> plain_norm_h;  // ||psi_h||^2
    std::vector<double> intertwining;  // ||eta phi - psi_h||
    double metric_norm_drift = 0.0;    // max relative drift of <phi|rho|phi>
    double plain_norm_drift_H = 0.0;
    double plain_norm_drift_h = 0.0;
    double intertwining_final = 0.0;
    double max_leak = 0.0;
    std::size_t steps = 0;
};

using ElementPath = std::function<AlgebraElement(double)>;
using GroupPath = std::function<GroupElement(double)>;  // with parameter rates

// Crank-Nicolson (midpoint H) for phi under H and psi_h under
// h = eta H eta^{-1} + i hbar eta_t eta^{-1}, psi_h(t0) = eta(t0) phi0, with
// t0 = grid.front(). Each grid interval is split into equal steps no longer
// than opt.dt and the state is recorded at every grid time.
// Throws PreconditionError if phi0 is not supported on the trusted block, the
// grid is not increasing, or the step is too large for the non-Hermitian part;
// TruncationOverflow on leaks.
PropagationReport propagate_check(const ElementPath& H, const GroupPath& eta, const StateVector& phi0,
                                  const std::vector<double>& grid, const MatrixBasis& basis,
                                  const PropagationOptions& opt = {});

// Fock state |n> of size basis.N.
StateVector fock_state(std::size_t n, const MatrixBasis& basis);

}  // namespace ptinv
