#include <cmath>
#include <cstdio>
#include <memory>

#include "ptinv/dyson.hpp"
#include "ptinv/invariants.hpp"
#include "ptinv/matrixrep.hpp"
#include "ptinv/scenario.hpp"

namespace ptinv::scenario {

namespace {

void add_check(RunReport& rep, std::string name, double value, double tol) {
    rep.checks.push_back({std::move(name), value, tol, std::isfinite(value) && value <= tol, false, rep.stage});
}

std::string describe(const Check& c) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s = %.3e %s %.3e", c.name.c_str(), c.value, c.lower_bound ? "not >" : ">",
                  c.tolerance);
    return buf;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

std::vector<Basis> dyson_family(TargetKind k) {
    if (k == TargetKind::ComplexLinear) return {Basis::P, Basis::X};
    return {Basis::X2};
}

void invariant_stage(RunReport& rep, const ScenarioConfig& cfg, const std::vector<AuxPoint>& pts,
                     const InvariantTrajectory& tr, const std::vector<AlgebraElement>& H) {
    const auto& spec = cfg.spec;
    const OperatorAlgebra alg(spec.hbar);
    const bool swanson = spec.target.kind != TargetKind::ComplexLinear;
    const bool real = spec.field == FieldMode::Real;
    auto lr = lr_residual(tr, H, alg);
    double sym_max = 0.0;
    bool any_sym = false;
    rep.rows.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const AuxPoint& p = pts[i];
        Row& r = rep.rows[i];
        r.t = p.t;
        r.sigma = p.sigma.real();
        r.sigma_t = p.sigma_t.real();
        r.gamma = p.gamma.real();
        r.gamma_t = p.gamma_t.real();
        rep.max_imag_aux = std::max({rep.max_imag_aux, std::abs(p.sigma.imag()), std::abs(p.gamma.imag())});
        if (swanson) {
            r.alpha_r = p.alpha_r.real();
            r.alpha_i = p.alpha_i.real();
        }
        const CanonicalCoeffs c = canonical_split(tr.I[i]);
        r.a_r = c.a_r;
        r.b_r = c.b_r;
        r.c_r = c.c_r;
        r.c_i = c.c_i;
        r.d_r = c.d_r;
        r.d_i = c.d_i;
        r.e_r = c.e_r;
        r.e_i = c.e_i;
        r.f_r = c.f_r;
        r.f_i = c.f_i;
        r.lr_residual = lr[i];
        if (swanson && real) {
            const double target = (p.alpha_r * spec.reference.m * std::pow(p.sigma, spec.n())).real();
            if (auto sp = symmetry_ratios(c).spread(target)) {
                r.sym_spread = *sp;
                sym_max = std::max(sym_max, *sp);
                any_sym = true;
            }
        }
    }
    double lr_max = 0.0;
    for (double v : lr) lr_max = std::max(lr_max, v);
    add_check(rep, "lr_residual_max", lr_max, cfg.budget.lr);
    if (any_sym) add_check(rep, "symmetry_spread_max", sym_max, cfg.budget.symmetry);
}

std::vector<GroupElement> dyson_stage(RunReport& rep, const ScenarioConfig& cfg, const std::vector<AuxPoint>& pts,
                                      const InvariantTrajectory& tr, const std::vector<AlgebraElement>& H) {
    const auto& spec = cfg.spec;
    const OperatorAlgebra alg(spec.hbar);
    const bool cl = spec.target.kind == TargetKind::ComplexLinear;
    std::vector<GroupElement> eta;
    eta.reserve(pts.size());
    for (const AuxPoint& p : pts) eta.push_back(solve_closed_form(spec, p));

    HermitianCounterparts hc = hermitian_counterparts(eta, tr.I, H, alg, cfg.budget.hermiticity);

    double ih_def = 0.0, h_def = 0.0, h_closed = 0.0, shift = 0.0, coeff_form = 0.0, ident = 0.0, ih_lr = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Row& r = rep.rows[i];
        const auto& f = eta[i].factors();
        r.theta2_or_epsilon = f[0].parameter.real();
        if (cl) r.lambda = f[1].parameter.real();
        r.Ih_defect = hc.I_h_defect[i];
        r.h_defect = hc.h_defect[i];
        ih_def = std::max(ih_def, hc.I_h_defect[i]);
        h_def = std::max(h_def, hc.h_defect[i]);

        AlgebraElement closed = closed_form_hermitian_hamiltonian(spec, pts[i]);
        h_closed = std::max(h_closed, (hc.h[i] - closed).max_abs() / std::max(1.0, closed.max_abs()));

        const CanonicalCoeffs c = canonical_split(tr.I[i]);
        if (cl) {
            LinearDysonParams lp = complex_linear_from_coeffs(c, spec.hbar);
            coeff_form = std::max({coeff_form, rel_diff(lp.epsilon, f[0].parameter.real()),
                                   rel_diff(lp.lambda, f[1].parameter.real())});
            if (c.f_i != 0.0) ident = std::max(ident, complex_linear_identity_defect(c));
        } else {
            coeff_form = std::max(coeff_form, rel_diff(swanson_theta_from_coeffs(c, spec.hbar), f[0].parameter.real()));
            const double expect = c.d_r + swanson_Ih_x2_shift(spec, pts[i]);
            shift = std::max(shift, std::abs(hc.I_h[i][3].real() - expect) / std::max(1.0, std::abs(expect)));
        }
        AlgebraElement dIh = hermitian_invariant_rate(eta[i], tr.I[i], tr.dI[i], alg);
        ih_lr = std::max(ih_lr, lr_residual_element(hc.I_h[i], dIh, hc.h[i], alg).max_abs());
    }
    add_check(rep, "Ih_hermiticity_max", ih_def, cfg.budget.hermiticity);
    add_check(rep, "h_hermiticity_max", h_def, cfg.budget.hermiticity);
    add_check(rep, "h_closed_form_max", h_closed, cfg.budget.closed_form);
    if (!cl) add_check(rep, "Ih_x2_shift_max", shift, cfg.budget.closed_form);
    add_check(rep, "map_coefficient_form_max", coeff_form, cfg.budget.identity);
    if (cl) add_check(rep, "linear_identity_max", ident, cfg.budget.identity);
    add_check(rep, "Ih_lr_residual_max", ih_lr, cfg.budget.hermitian_lr);

    // generic solver from a zero guess, continued along the grid
    auto family = dyson_family(spec.target.kind);
    auto gen = solve_generic(tr.I, tr.dI, family, {}, alg);
    double gen_diff = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& f = eta[i].factors();
        for (std::size_t k = 0; k < family.size(); ++k) {
            gen_diff = std::max(gen_diff, rel_diff(gen[i].params[k], f[k].parameter.real()));
            gen_diff = std::max(gen_diff, rel_diff(gen[i].rates[k], f[k].rate->real()));
        }
    }
    add_check(rep, "generic_vs_closed_max", gen_diff, cfg.budget.generic);
    return eta;
}

void matrix_stage(RunReport& rep, const ScenarioConfig& cfg, const AuxTrajectory& aux, const std::vector<AuxPoint>& pts,
                  const std::vector<GroupElement>& eta, const std::vector<AlgebraElement>& H) {
    const auto& spec = cfg.spec;
    const auto& o = cfg.oracle;
    const OperatorAlgebra alg(spec.hbar);
    MatrixBasis mb{o.N, o.N_trust, o.m0, o.omega0, spec.hbar};
    GroupExponentiator ex(mb);

    // matrix-level LR residual (finite-difference dI) against the coefficient level
    std::vector<double> times(o.lr_samples);
    for (std::size_t k = 0; k < o.lr_samples; ++k)
        times[k] = cfg.window.t0 + (cfg.window.t1 - cfg.window.t0) * static_cast<double>(k) / (o.lr_samples - 1);
    auto fd = invariant_rate_fd(aux, times, 1e-4);
    double agree = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        AuxPoint p = aux.at(times[k]);
        AlgebraElement I = build_invariant(spec, p);
        AlgebraElement Hk = aux.constraints().target_hamiltonian(p);
        DenseOperator Rm = matrix_lr_residual(I, fd[k], Hk, mb);
        DenseOperator Rc = trusted_block(materialize(lr_residual_element(I, invariant_rate(spec, p), Hk, alg), mb), mb);
        agree = std::max(agree, max_abs(Rm - Rc));
    }
    add_check(rep, "matrix_lr_agreement_max", agree, cfg.budget.matrix);

    double min_eig = INFINITY;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i % o.metric_stride != 0 && i + 1 != pts.size()) continue;
        const double v = metric_spectrum(metric(eta[i]), ex);
        rep.rows[i].metric_min_eig = v;
        min_eig = std::min(min_eig, v);
    }
    rep.checks.push_back({"metric_min_eig", min_eig, 0.0, min_eig > 0.0, true, rep.stage});

    if (o.propagate_span <= 0.0) return;
    const double t_end = std::min(cfg.window.t1, cfg.window.t0 + o.propagate_span);
    std::vector<double> grid;
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (pts[i].t <= t_end + 1e-12) {
            grid.push_back(pts[i].t);
            rows.push_back(i);
        }
    if (grid.size() < 2) return;
    rep.propagation_end = grid.back();
    PropagationOptions po;
    po.dt = o.cn_dt;
    PropagationReport pr = propagate_check([&](double t) { return hamiltonian_at(aux, t); },
                                           [&](double t) { return solve_closed_form(aux, t); }, fock_state(0, mb), grid,
                                           mb, po);
    for (std::size_t k = 0; k < rows.size(); ++k)
        rep.rows[rows[k]].metric_norm_drift = std::abs(pr.metric_norm[k] / pr.metric_norm[0] - 1.0);
    add_check(rep, "metric_norm_drift_max", pr.metric_norm_drift, cfg.budget.metric_drift);
    add_check(rep, "intertwining_final", pr.intertwining_final, cfg.budget.intertwining);

    // Hermitian control: a Hermitian H must conserve the plain norm
    double h_herm = 0.0;
    for (const auto& h : H) h_herm = std::max(h_herm, h.hermiticity_defect());
    if (h_herm == 0.0) add_check(rep, "control_norm_drift", pr.plain_norm_drift_H, cfg.budget.control_norm);
}

}  // namespace

RunReport run(const ScenarioConfig& cfg) {
    RunReport rep;
    rep.name = cfg.name;
    rep.target = cfg.spec.target.kind;
    try {
        rep.stage = "validate";
        auto diags = validate(cfg);
        if (!diags.empty()) throw ValidationError(diags);
        rep.special_case = to_string(detect_special_case(cfg.spec, cfg.initial));

        rep.stage = "constraints";
        auto cs = std::make_shared<const ConstraintSet>(cfg.spec);

        rep.stage = "aux";
        AuxTrajectory aux = solve_aux(*cs, cfg.initial, cfg.window, cfg.ode);
        rep.ode_steps = aux.step_times().size();

        rep.stage = "invariant";
        std::vector<double> grid = aux.report_grid(cfg.grid);
        InvariantTrajectory tr = build_invariant_trajectory(aux, grid);
        std::vector<AuxPoint> pts;
        std::vector<AlgebraElement> H;
        pts.reserve(grid.size());
        for (double t : grid) {
            pts.push_back(aux.at(t));
            H.push_back(cs->target_hamiltonian(pts.back()));
        }
        invariant_stage(rep, cfg, pts, tr, H);

        // real-parameter Dyson maps apply only to the real field mode
        if (cfg.spec.field == FieldMode::Real) {
            rep.stage = "dyson";
            auto eta = dyson_stage(rep, cfg, pts, tr, H);
            if (cfg.oracle.enabled) {
                rep.stage = "matrix";
                matrix_stage(rep, cfg, aux, pts, eta, H);
            }
        }
        rep.stage = "done";
        for (const auto& c : rep.checks)
            if (!c.pass) {
                if (rep.exit_code == kOk) rep.stage = c.stage;
                rep.exit_code = kToleranceViolation;
                if (!rep.message.empty()) rep.message += "; ";
                rep.message += describe(c);
            }
    } catch (const ValidationError& e) {
        rep.exit_code = kConfigError;
        rep.message = e.what();
    } catch (const PreconditionError& e) {
        rep.exit_code = kConfigError;
        rep.message = e.what();
    } catch (const UnsupportedError& e) {
        rep.exit_code = kConfigError;
        rep.message = e.what();
    } catch (const ParseError& e) {
        rep.exit_code = kConfigError;
        rep.message = e.what();
    } catch (const Error& e) {
        // integration failures, domain errors, non-convergence, Hermiticity, truncation
        rep.exit_code = kToleranceViolation;
        rep.message = e.what();
    } catch (const std::exception& e) {
        rep.exit_code = kInternalError;
        rep.message = e.what();
    }
    return rep;
}

}  // namespace ptinv::scenario
