#include "ptinv/matrixrep.hpp"

#include <cfloat>
#include <cmath>
#include <complex>
#include <optional>

#include "ptinv/errors.hpp"

namespace ptinv {

void MatrixBasis::validate() const {
    if (N < 8) throw PreconditionError("matrix basis needs N >= 8");
    if (N_trust == 0 || N_trust > N / 2) throw PreconditionError("matrix basis needs 0 < N_trust <= N/2");
    if (!(m0 > 0.0) || !(omega0 > 0.0) || !(hbar > 0.0)) throw PreconditionError("matrix basis scales must be positive");
}

double MatrixBasis::length() const { return std::sqrt(hbar / (2.0 * m0 * omega0)); }

BandOperator materialize_band(const AlgebraElement& A, const MatrixBasis& basis) {
    basis.validate();
    const Eigen::Index N = static_cast<Eigen::Index>(basis.N);
    const double l = basis.length();
    const double c = basis.hbar / (2.0 * l);
    const cplx I(0.0, 1.0);
    BandOperator B = BandOperator::Zero(N, 5);
    for (Eigen::Index n = 0; n < N; ++n) {
        const double dn = static_cast<double>(n);
        B(n, 2) = (A[0] * c * c + A[3] * l * l) * (2.0 * dn + 1.0) + A[5];
        if (n + 1 < N) {
            const double s1 = std::sqrt(dn + 1.0);
            // <n|op|n+1> and <n+1|op|n>
            B(n, 3) += A[4] * l * s1 - A[1] * I * c * s1;
            B(n + 1, 1) += A[4] * l * s1 + A[1] * I * c * s1;
        }
        if (n + 2 < N) {
            const double s2 = std::sqrt((dn + 1.0) * (dn + 2.0));
            B(n, 4) += (A[3] * l * l - A[0] * c * c) * s2 - A[2] * I * basis.hbar * s2;
            B(n + 2, 0) += (A[3] * l * l - A[0] * c * c) * s2 + A[2] * I * basis.hbar * s2;
        }
    }
    return B;
}

namespace {

DenseOperator band_to_dense(const BandOperator& B) {
    const Eigen::Index N = B.rows();
    DenseOperator M = DenseOperator::Zero(N, N);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index k = 0; k < 5; ++k) {
            const Eigen::Index j = i + k - 2;
            if (j >= 0 && j < N) M(i, j) = B(i, k);
        }
    return M;
}

StateVector band_apply(const BandOperator& B, const StateVector& v) {
    const Eigen::Index N = B.rows();
    StateVector out = StateVector::Zero(N);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index k = 0; k < 5; ++k) {
            const Eigen::Index j = i + k - 2;
            if (j >= 0 && j < N) out(i) += B(i, k) * v(j);
        }
    return out;
}

// Solves B x = rhs for a pentadiagonal B without pivoting. Used on
// 1 + i dt H / 2 hbar, whose Hermitian part is positive definite under the
// step heuristic checked by the caller.
StateVector band_solve(BandOperator B, StateVector rhs) {
    const Eigen::Index N = B.rows();
    for (Eigen::Index i = 0; i < N; ++i) {
        const cplx piv = B(i, 2);
        if (piv == cplx(0.0)) throw IntegrationError("singular Crank-Nicolson matrix", 0.0);
        for (Eigen::Index r = 1; r <= 2 && i + r < N; ++r) {
            // row i + r, column i sits at band index 2 - r
            const cplx f = B(i + r, 2 - r) / piv;
            if (f == cplx(0.0)) continue;
            for (Eigen::Index k = 0; k <= 2; ++k) {
                // column i + k in row i is band index 2 + k; in row i + r it is 2 + k - r
                const Eigen::Index kk = 2 + k - r;
                if (kk >= 0 && kk < 5) B(i + r, kk) -= f * B(i, 2 + k);
            }
            rhs(i + r) -= f * rhs(i);
        }
    }
    for (Eigen::Index i = N - 1; i >= 0; --i) {
        cplx acc = rhs(i);
        for (Eigen::Index k = 1; k <= 2 && i + k < N; ++k) acc -= B(i, 2 + k) * rhs(i + k);
        rhs(i) = acc / B(i, 2);
    }
    return rhs;
}

double band_inf_norm(const BandOperator& B) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < B.rows(); ++i) best = std::max(best, B.row(i).cwiseAbs().sum());
    return best;
}

}  // namespace

DenseOperator materialize(const AlgebraElement& A, const MatrixBasis& basis) {
    return band_to_dense(materialize_band(A, basis));
}

DenseOperator trusted_block(const DenseOperator& M, const MatrixBasis& basis) {
    const Eigen::Index n = static_cast<Eigen::Index>(basis.N_trust);
    return M.topLeftCorner(n, n);
}

double max_abs(const DenseOperator& M) { return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff(); }

namespace {

// Band of A with entries computed in long double (same layout as materialize_band).
using LBand = std::vector<std::array<std::complex<long double>, 5>>;

LBand long_band(const AlgebraElement& A, const MatrixBasis& basis) {
    using L = std::complex<long double>;
    using R = long double;
    const std::size_t N = basis.N;
    const R hb = basis.hbar;
    const R l = std::sqrt(hb / (2.0L * basis.m0 * basis.omega0));
    const R c = hb / (2.0L * l);
    const L I(0.0L, 1.0L);
    auto cv = [&](std::size_t k) { return L(A[k].real(), A[k].imag()); };
    LBand B(N);
    for (auto& row : B) row.fill(L(0));
    for (std::size_t n = 0; n < N; ++n) {
        const R dn = static_cast<R>(n);
        B[n][2] = (cv(0) * c * c + cv(3) * l * l) * (2.0L * dn + 1.0L) + cv(5);
        if (n + 1 < N) {
            const R s1 = std::sqrt(dn + 1.0L);
            B[n][3] += cv(4) * l * s1 - cv(1) * I * c * s1;
            B[n + 1][1] += cv(4) * l * s1 + cv(1) * I * c * s1;
        }
        if (n + 2 < N) {
            const R s2 = std::sqrt((dn + 1.0L) * (dn + 2.0L));
            B[n][4] += (cv(3) * l * l - cv(0) * c * c) * s2 - cv(2) * I * hb * s2;
            B[n + 2][0] += (cv(3) * l * l - cv(0) * c * c) * s2 + cv(2) * I * hb * s2;
        }
    }
    return B;
}

}  // namespace

double commutator_check(const AlgebraElement& A, const AlgebraElement& B, const MatrixBasis& basis) {
    // Extended precision: entries near the trusted edge are O(N) while the
    // products being cancelled are O(N^2).
    using L = std::complex<long double>;
    basis.validate();
    OperatorAlgebra alg(basis.hbar);
    LBand a = long_band(A, basis), b = long_band(B, basis), c = long_band(alg.commutator(A, B), basis);
    const long N = static_cast<long>(basis.N), nt = static_cast<long>(basis.N_trust);
    auto at = [&](const LBand& M, long i, long j) -> L {
        const long k = j - i + 2;
        if (j < 0 || j >= N || k < 0 || k > 4) return L(0);
        return M[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    };
    double worst = 0.0;
    for (long i = 0; i < nt; ++i)
        for (long j = std::max(0L, i - 4); j <= std::min(nt - 1, i + 4); ++j) {
            L acc = -at(c, i, j);
            for (long k = std::max(0L, i - 2); k <= std::min(N - 1, i + 2); ++k)
                acc += at(a, i, k) * at(b, k, j) - at(b, i, k) * at(a, k, j);
            worst = std::max(worst, static_cast<double>(std::abs(acc)));
        }
    return worst;
}

GroupExponentiator::GroupExponentiator(const MatrixBasis& basis) : basis_(basis) {
    basis_.validate();
    for (std::size_t g = 0; g < 5; ++g) {
        AlgebraElement u = AlgebraElement::unit(static_cast<Basis>(g));
        generators_[g] = materialize_band(u, basis_);
        Eigen::SelfAdjointEigenSolver<DenseOperator> es(band_to_dense(generators_[g]), Eigen::EigenvaluesOnly);
        radius_[g] = es.eigenvalues().cwiseAbs().maxCoeff();
        norm_[g] = band_inf_norm(generators_[g]);
    }
}

void GroupExponentiator::check(const GroupElement& g) const {
    const double limit = std::log(DBL_MAX);
    for (const GroupFactor& f : g.factors()) {
        if (std::abs(f.parameter.imag()) > 1e-14 * std::max(1.0, std::abs(f.parameter.real())))
            throw PreconditionError("matrix exponential needs a real group parameter");
        const std::size_t gi = static_cast<std::size_t>(f.generator);
        if (std::abs(f.parameter.real()) * radius_[gi] > limit)
            throw TruncationOverflow("exp(" + std::to_string(f.parameter.real()) + " " + basis_name(f.generator) +
                                     ") overflows at N=" + std::to_string(basis_.N));
    }
}

DenseOperator GroupExponentiator::apply_block(const GroupElement& g, DenseOperator block) const {
    check(g);
    const auto& fs = g.factors();
    for (auto it = fs.rbegin(); it != fs.rend(); ++it) {
        const GroupFactor& f = *it;
        const double theta = f.parameter.real();
        const std::size_t gi = static_cast<std::size_t>(f.generator);
        if (theta == 0.0) continue;
        const BandOperator& G = generators_[gi];
        const int sub = std::max(1, static_cast<int>(std::ceil(std::abs(theta) * norm_[gi])));
        const double h = theta / sub;
        for (int s = 0; s < sub; ++s)
            for (Eigen::Index c = 0; c < block.cols(); ++c) {
                StateVector term = block.col(c), sum = term;
                for (int k = 1; k < 200; ++k) {
                    term = band_apply(G, term) * (h / k);
                    sum += term;
                    if (term.norm() <= 1e-18 * sum.norm()) break;
                }
                block.col(c) = sum;
            }
    }
    if (!block.allFinite()) throw TruncationOverflow("non-finite matrix exponential");
    return block;
}

StateVector GroupExponentiator::apply(const GroupElement& g, const StateVector& v) const {
    return apply_block(g, DenseOperator(v)).col(0);
}

DenseOperator GroupExponentiator::operator()(const GroupElement& g) const {
    const Eigen::Index N = static_cast<Eigen::Index>(basis_.N);
    return apply_block(g, DenseOperator::Identity(N, N));
}

namespace {

// A palindromic product of real-parameter factors (what metric() yields after
// simplification) is eta^dag eta with eta = (middle / 2) followed by the tail.
std::optional<GroupElement> metric_root(const GroupElement& rho) {
    const auto& f = rho.factors();
    const std::size_t n = f.size();
    if (n == 0) return std::nullopt;
    for (std::size_t k = 0; k < n; ++k) {
        const GroupFactor& a = f[k];
        const GroupFactor& b = f[n - 1 - k];
        if (a.parameter.imag() != 0.0 || a.generator != b.generator || a.parameter != b.parameter) return std::nullopt;
    }
    std::vector<GroupFactor> root;
    if (n % 2 == 1) root.emplace_back(f[n / 2].generator, 0.5 * f[n / 2].parameter);
    root.insert(root.end(), f.begin() + static_cast<std::ptrdiff_t>((n + 1) / 2), f.end());
    return GroupElement(std::move(root));
}

}  // namespace

double metric_spectrum(const GroupElement& rho, const GroupExponentiator& ex) {
    const MatrixBasis& b = ex.basis();
    const Eigen::Index N = static_cast<Eigen::Index>(b.N), nt = static_cast<Eigen::Index>(b.N_trust);
    DenseOperator P = DenseOperator::Identity(N, nt);
    ex.check(rho);
    DenseOperator S;
    if (auto eta = metric_root(rho)) {
        // smallest singular value of eta P, squared; avoids forming E^dag E
        DenseOperator E = ex.apply_block(*eta, P);
        Eigen::JacobiSVD<DenseOperator> svd(E);
        const double smin = svd.singularValues()(svd.singularValues().size() - 1);
        return smin * smin;
    } else {
        S = ex.apply_block(rho, P).topRows(nt);
    }
    S = 0.5 * (S + S.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double metric_spectrum(const GroupElement& rho, const MatrixBasis& basis) {
    return metric_spectrum(rho, GroupExponentiator(basis));
}

DenseOperator matrix_lr_residual(const AlgebraElement& I, const AlgebraElement& dI, const AlgebraElement& H,
                                 const MatrixBasis& basis) {
    DenseOperator mi = materialize(I, basis), mh = materialize(H, basis);
    DenseOperator R = materialize(dI, basis) + cplx(0.0, -1.0 / basis.hbar) * (mi * mh - mh * mi);
    return trusted_block(R, basis);
}

StateVector fock_state(std::size_t n, const MatrixBasis& basis) {
    if (n >= basis.N) throw PreconditionError("Fock index outside the basis");
    StateVector v = StateVector::Zero(static_cast<Eigen::Index>(basis.N));
    v(static_cast<Eigen::Index>(n)) = 1.0;
    return v;
}

namespace {

struct CrankNicolson {
    const MatrixBasis& basis;
    double dt;

    StateVector step(const AlgebraElement& Hmid, const StateVector& v) const {
        BandOperator B = materialize_band(Hmid, basis);
        // heuristic: the anti-Hermitian part must not make 1 + i dt H / 2 hbar indefinite
        BandOperator anti = 0.5 * (B - materialize_band(dagger(Hmid), basis));
        if (0.5 * dt / basis.hbar * band_inf_norm(anti) >= 0.5)
            throw PreconditionError("Crank-Nicolson time step too large for the non-Hermitian part");
        const cplx k(0.0, 0.5 * dt / basis.hbar);
        BandOperator rhs_op = -k * B;
        BandOperator lhs_op = k * B;
        rhs_op.col(2).array() += 1.0;
        lhs_op.col(2).array() += 1.0;
        return band_solve(lhs_op, band_apply(rhs_op, v));
    }
};

double top_quarter(const StateVector& v) {
    const Eigen::Index N = v.size();
    const Eigen::Index start = N - N / 4;
    const double total = v.squaredNorm();
    return total == 0.0 ? 0.0 : v.tail(N - start).squaredNorm() / total;
}

}  // namespace

PropagationReport propagate_check(const ElementPath& H, const GroupPath& eta, const StateVector& phi0,
                                  const std::vector<double>& grid, const MatrixBasis& basis,
                                  const PropagationOptions& opt) {
    basis.validate();
    if (phi0.size() != static_cast<Eigen::Index>(basis.N)) throw PreconditionError("initial state has the wrong size");
    if (!(opt.dt > 0.0)) throw PreconditionError("propagation needs dt > 0");
    if (grid.empty()) throw PreconditionError("propagation grid is empty");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw PreconditionError("propagation grid must be strictly increasing");
    const Eigen::Index nt = static_cast<Eigen::Index>(basis.N_trust);
    if (phi0.tail(phi0.size() - nt).squaredNorm() > 1e-24 * std::max(1.0, phi0.squaredNorm()))
        throw PreconditionError("initial state is not supported on the trusted block");

    OperatorAlgebra alg(basis.hbar);
    GroupExponentiator ex(basis);
    CrankNicolson cn{basis, opt.dt};
    const cplx ih(0.0, basis.hbar);
    auto h_at = [&](double t) {
        GroupElement e = eta(t);
        return alg.adjoint_action(e, H(t)) + ih * alg.flow_derivative(e);
    };

    PropagationReport rep;
    StateVector phi = phi0;
    StateVector psi = ex.apply(eta(grid.front()), phi0);
    double rho0 = 0.0, nH0 = 0.0, nh0 = 0.0;
    auto record = [&](double t) {
        StateVector ephi = ex.apply(eta(t), phi);
        const double mn = ephi.squaredNorm();  // <phi| eta^dag eta |phi>
        const double nH = phi.squaredNorm(), nh = psi.squaredNorm();
        if (rep.times.empty()) {
            rho0 = mn;
            nH0 = nH;
            nh0 = nh;
        }
        rep.times.push_back(t);
        rep.metric_norm.push_back(mn);
        rep.plain_norm_H.push_back(nH);
        rep.plain_norm_h.push_back(nh);
        rep.intertwining.push_back((ephi - psi).norm());
        rep.metric_norm_drift = std::max(rep.metric_norm_drift, std::abs(mn - rho0) / rho0);
        rep.plain_norm_drift_H = std::max(rep.plain_norm_drift_H, std::abs(nH - nH0) / nH0);
        rep.plain_norm_drift_h = std::max(rep.plain_norm_drift_h, std::abs(nh - nh0) / nh0);
        rep.intertwining_final = rep.intertwining.back();
        rep.max_leak = std::max({rep.max_leak, top_quarter(phi), top_quarter(psi)});
        if (rep.max_leak > opt.leak_tolerance)
            throw TruncationOverflow("state leaks past the trusted block (top-quarter population " +
                                     std::to_string(rep.max_leak) + ")");
    };

    record(grid.front());
    for (std::size_t g = 1; g < grid.size(); ++g) {
        const double span = grid[g] - grid[g - 1];
        const std::size_t n = static_cast<std::size_t>(std::ceil(span / opt.dt - 1e-9));
        const double dt = span / static_cast<double>(std::max<std::size_t>(n, 1));
        cn.dt = dt;
        for (std::size_t k = 0; k < std::max<std::size_t>(n, 1); ++k) {
            const double tm = grid[g - 1] + (static_cast<double>(k) + 0.5) * dt;
            phi = cn.step(H(tm), phi);
            psi = cn.step(h_at(tm), psi);
            ++rep.steps;
        }
        record(grid[g]);
    }
    return rep;
}

}  // namespace ptinv
