#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "ptinv/matrixrep.hpp"
#include "ptinv/scenario.hpp"

namespace ptinv::scenario {

std::string format(const std::vector<Diagnostic>& diags) {
    std::string out;
    for (const auto& d : diags) {
        if (!out.empty()) out += '\n';
        out += d.path.empty() ? d.message : d.path + ": " + d.message;
    }
    return out;
}

RawConfig parse_raw(std::istream& in, const std::string& source) {
    RawConfig raw;
    try {
        boost::property_tree::ini_parser::read_ini(in, raw);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ValidationError("", source + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    return raw;
}

RawConfig read_raw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("", "cannot open " + path.string());
    return parse_raw(in, path.string());
}

void set_override(RawConfig& raw, const std::string& key, const std::string& value) {
    if (key.empty() || key.front() == '.' || key.back() == '.') throw ValidationError(key, "malformed override key");
    raw.put(key, value);
}

namespace {

// Known keys per section; "" is the top level.
const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s{
        {"", {"schema_version"}},
        {"scenario", {"name", "field", "hbar"}},
        {"reference", {"kind", "m", "omega", "a", "b"}},
        {"target", {"kind", "Omega", "alpha_r_form", "alpha_r", "alpha_power", "c2", "alpha_i_mode", "alpha_i"}},
        {"transform", {"r", "s", "c1"}},
        {"initial", {"sigma", "sigma_t", "gamma", "gamma_t"}},
        {"window", {"t0", "t1", "grid"}},
        {"tolerances",
         {"abs", "rel", "max_steps", "lr", "hermiticity", "closed_form", "symmetry", "identity", "generic",
          "hermitian_lr", "matrix", "metric_drift", "intertwining", "control_norm"}},
        {"oracle",
         {"enabled", "N", "N_trust", "m0", "omega0", "cn_dt", "propagate_span", "metric_stride", "lr_samples"}},
        {"output", {"dir"}},
    };
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class Reader {
public:
    explicit Reader(const RawConfig& raw) : raw_(raw) {}

    std::vector<Diagnostic> diags;

    std::optional<std::string> text(const std::string& path) const {
        auto v = raw_.get_optional<std::string>(path);
        if (!v) return std::nullopt;
        return trim(*v);
    }

    std::string required(const std::string& path) {
        auto v = text(path);
        if (!v || v->empty()) {
            diags.push_back({path, "missing required key"});
            return "";
        }
        return *v;
    }

    double number(const std::string& path, double fallback) {
        auto v = text(path);
        if (!v) return fallback;
        double out = 0.0;
        const char* b = v->data();
        const char* e = b + v->size();
        auto [ptr, ec] = std::from_chars(b, e, out);
        if (ec != std::errc() || ptr != e || !std::isfinite(out)) {
            diags.push_back({path, "expected a finite number, got '" + *v + "'"});
            return fallback;
        }
        return out;
    }

    std::size_t count(const std::string& path, std::size_t fallback) {
        auto v = text(path);
        if (!v) return fallback;
        std::size_t out = 0;
        const char* b = v->data();
        const char* e = b + v->size();
        auto [ptr, ec] = std::from_chars(b, e, out);
        if (ec != std::errc() || ptr != e) {
            diags.push_back({path, "expected a non-negative integer, got '" + *v + "'"});
            return fallback;
        }
        return out;
    }

    bool flag(const std::string& path, bool fallback) {
        auto v = text(path);
        if (!v) return fallback;
        if (*v == "true" || *v == "yes" || *v == "on" || *v == "1") return true;
        if (*v == "false" || *v == "no" || *v == "off" || *v == "0") return false;
        diags.push_back({path, "expected true or false, got '" + *v + "'"});
        return fallback;
    }

    std::optional<expr::Expr> expression(const std::string& path) {
        auto v = text(path);
        if (!v) return std::nullopt;
        try {
            return expr::Expr::parse(*v);
        } catch (const ParseError& e) {
            diags.push_back({path, e.what()});
            return std::nullopt;
        }
    }

    template <class E>
    E choice(const std::string& path, const std::vector<std::pair<std::string, E>>& options, E fallback,
             bool required_key = false) {
        auto v = text(path);
        if (!v || v->empty()) {
            if (required_key) diags.push_back({path, "missing required key"});
            return fallback;
        }
        std::string allowed;
        for (const auto& [name, value] : options) {
            if (*v == name) return value;
            allowed += (allowed.empty() ? "" : "|") + name;
        }
        diags.push_back({path, "unknown value '" + *v + "' (expected " + allowed + ")"});
        return fallback;
    }

    void unknown_keys() {
        const auto& s = schema();
        for (const auto& [key, node] : raw_) {
            if (node.empty()) {
                if (!s.at("").count(key)) diags.push_back({key, "unknown key"});
                continue;
            }
            auto sec = s.find(key);
            if (sec == s.end() || key.empty()) {
                diags.push_back({key, "unknown section"});
                continue;
            }
            for (const auto& [k, child] : node)
                if (!sec->second.count(k)) diags.push_back({key + "." + k, "unknown key"});
        }
    }

private:
    const RawConfig& raw_;
};

}  // namespace

ScenarioConfig interpret(const RawConfig& raw) {
    Reader rd(raw);
    rd.unknown_keys();
    ScenarioConfig c;

    c.schema_version = static_cast<int>(rd.number("schema_version", -1));
    if (c.schema_version != kSchemaVersion)
        rd.diags.push_back({"schema_version", "expected schema_version = " + std::to_string(kSchemaVersion)});

    c.name = rd.required("scenario.name");
    c.spec.field = rd.choice<FieldMode>("scenario.field", {{"real", FieldMode::Real}, {"complex", FieldMode::Complex}},
                                        FieldMode::Real);
    c.spec.hbar = rd.number("scenario.hbar", 1.0);

    auto& ref = c.spec.reference;
    ref.kind = rd.choice<ReferenceKind>("reference.kind",
                                        {{"harmonic_oscillator", ReferenceKind::HarmonicOscillator},
                                         {"free", ReferenceKind::Free},
                                         {"linear_real", ReferenceKind::LinearReal},
                                         {"linear_imaginary", ReferenceKind::LinearImaginary},
                                         {"dilation", ReferenceKind::Dilation}},
                                        ReferenceKind::HarmonicOscillator, true);
    ref.m = rd.number("reference.m", 1.0);
    ref.omega = rd.number("reference.omega", 1.0);
    ref.a = rd.number("reference.a", 0.0);
    ref.b = rd.number("reference.b", 0.0);

    auto& tg = c.spec.target;
    tg.kind = rd.choice<TargetKind>("target.kind",
                                    {{"swanson_fixed_mass", TargetKind::SwansonFixedMass},
                                     {"swanson_variable_mass", TargetKind::SwansonVariableMass},
                                     {"complex_linear", TargetKind::ComplexLinear}},
                                    TargetKind::SwansonVariableMass, true);
    tg.m = ref.m;
    tg.b = ref.b;
    if (auto om = rd.expression("target.Omega")) tg.Omega = *om;
    tg.alpha_r_form = rd.choice<AlphaRForm>(
        "target.alpha_r_form", {{"expression", AlphaRForm::Expression}, {"sigma_power", AlphaRForm::SigmaPower}},
        AlphaRForm::Expression);
    tg.alpha_r = rd.expression("target.alpha_r");
    tg.c2 = rd.number("target.c2", 1.0);
    tg.alpha_i_mode = rd.choice<AlphaIMode>("target.alpha_i_mode",
                                            {{"derived", AlphaIMode::Derived}, {"free", AlphaIMode::Free}},
                                            AlphaIMode::Derived);
    tg.alpha_i = rd.expression("target.alpha_i");

    c.spec.r = rd.number("transform.r", -2.0);
    c.spec.s = rd.number("transform.s", 1.0);
    c.spec.c1 = rd.number("transform.c1", 0.0);

    // alpha_power may name one of the special-case families.
    if (auto p = rd.text("target.alpha_power")) {
        if (*p == "r+2s")
            tg.alpha_power = c.spec.r + 2.0 * c.spec.s;
        else if (*p == "-2-r")
            tg.alpha_power = -2.0 - c.spec.r;
        else
            tg.alpha_power = rd.number("target.alpha_power", 0.0);
    }

    c.initial.sigma = rd.number("initial.sigma", 1.0);
    c.initial.sigma_t = rd.number("initial.sigma_t", 0.0);
    c.initial.gamma = rd.number("initial.gamma", 0.0);
    c.initial.gamma_t = rd.number("initial.gamma_t", 0.0);

    c.window.t0 = rd.number("window.t0", 0.0);
    c.window.t1 = rd.number("window.t1", 10.0);
    c.grid = rd.count("window.grid", 201);

    c.ode.abs_tol = rd.number("tolerances.abs", c.ode.abs_tol);
    c.ode.rel_tol = rd.number("tolerances.rel", c.ode.rel_tol);
    c.ode.max_steps = rd.count("tolerances.max_steps", c.ode.max_steps);
    auto& b = c.budget;
    b.lr = rd.number("tolerances.lr", b.lr);
    b.hermiticity = rd.number("tolerances.hermiticity", b.hermiticity);
    b.closed_form = rd.number("tolerances.closed_form", b.closed_form);
    b.symmetry = rd.number("tolerances.symmetry", b.symmetry);
    b.identity = rd.number("tolerances.identity", b.identity);
    b.generic = rd.number("tolerances.generic", b.generic);
    b.hermitian_lr = rd.number("tolerances.hermitian_lr", b.hermitian_lr);
    b.matrix = rd.number("tolerances.matrix", b.matrix);
    b.metric_drift = rd.number("tolerances.metric_drift", b.metric_drift);
    b.intertwining = rd.number("tolerances.intertwining", b.intertwining);
    b.control_norm = rd.number("tolerances.control_norm", b.control_norm);

    auto& o = c.oracle;
    o.enabled = rd.flag("oracle.enabled", o.enabled);
    o.N = rd.count("oracle.N", o.N);
    o.N_trust = rd.count("oracle.N_trust", o.N_trust);
    o.m0 = rd.number("oracle.m0", o.m0);
    o.omega0 = rd.number("oracle.omega0", o.omega0);
    o.cn_dt = rd.number("oracle.cn_dt", o.cn_dt);
    o.propagate_span = rd.number("oracle.propagate_span", o.propagate_span);
    o.metric_stride = rd.count("oracle.metric_stride", o.metric_stride);
    o.lr_samples = rd.count("oracle.lr_samples", o.lr_samples);

    if (auto d = rd.text("output.dir")) c.output_dir = *d;

    if (!rd.diags.empty()) throw ValidationError(rd.diags);
    return c;
}

ScenarioConfig load(const std::filesystem::path& path) { return interpret(read_raw(path)); }

std::vector<Diagnostic> validate(const ScenarioConfig& c) {
    std::vector<Diagnostic> d;
    const auto& spec = c.spec;
    const bool real = spec.field == FieldMode::Real;

    if (!(c.window.t1 > c.window.t0)) d.push_back({"window.t1", "window must have t1 > t0"});
    if (c.grid < 2) d.push_back({"window.grid", "need at least 2 report points"});
    if (real && !(c.initial.sigma.real() > 0.0)) d.push_back({"initial.sigma", "sigma must be positive"});
    if (!real && c.initial.sigma == cplx(0.0)) d.push_back({"initial.sigma", "sigma must be nonzero"});
    if (!(c.ode.abs_tol > 0.0) || !(c.ode.rel_tol > 0.0)) d.push_back({"tolerances", "integrator tolerances must be positive"});
    for (double v : {c.budget.lr, c.budget.hermiticity, c.budget.closed_form, c.budget.symmetry, c.budget.identity,
                     c.budget.generic, c.budget.hermitian_lr, c.budget.matrix, c.budget.metric_drift,
                     c.budget.intertwining, c.budget.control_norm})
        if (!(v > 0.0)) {
            d.push_back({"tolerances", "pass/fail tolerances must be positive"});
            break;
        }

    try {
        spec.reference.validate();
    } catch (const Error& e) {
        d.push_back({"reference", e.what()});
    }
    try {
        ConstraintSet cs(spec);
    } catch (const UnsupportedError& e) {
        d.push_back({"target.kind", e.what()});
    } catch (const Error& e) {
        d.push_back({"transform", e.what()});
    }

    if (spec.target.kind == TargetKind::ComplexLinear && real && spec.reference.omega == 0.0)
        d.push_back({"reference.omega", "complex linear Dyson map needs omega != 0"});

    // coarse scans for denominator hazards
    const std::size_t n = 400;
    auto scan = [&](const expr::Expr& e, const std::string& path, bool nonzero) {
        double prev = 0.0;
        for (std::size_t k = 0; k <= n; ++k) {
            const double t = c.window.t0 + (c.window.t1 - c.window.t0) * static_cast<double>(k) / n;
            double v = 0.0;
            try {
                v = e.eval(t);
            } catch (const Error& err) {
                d.push_back({path, err.what()});
                return;
            }
            if (!std::isfinite(v)) {
                d.push_back({path, "not finite at t = " + std::to_string(t)});
                return;
            }
            if (nonzero && (v == 0.0 || (k > 0 && (v > 0.0) != (prev > 0.0)))) {
                d.push_back({path, "alpha_r vanishes near t = " + std::to_string(t)});
                return;
            }
            prev = v;
        }
    };
    if (c.window.t1 > c.window.t0) {
        scan(spec.target.Omega, "target.Omega", false);
        if (spec.target.kind != TargetKind::ComplexLinear && spec.target.alpha_r_form == AlphaRForm::Expression &&
            spec.target.alpha_r)
            scan(*spec.target.alpha_r, "target.alpha_r", real);
        if (spec.target.alpha_i) scan(*spec.target.alpha_i, "target.alpha_i", false);
    }

    if (c.oracle.enabled) {
        MatrixBasis mb{c.oracle.N, c.oracle.N_trust, c.oracle.m0, c.oracle.omega0, spec.hbar};
        try {
            mb.validate();
        } catch (const Error& e) {
            d.push_back({"oracle", e.what()});
        }
        if (!(c.oracle.cn_dt > 0.0)) d.push_back({"oracle.cn_dt", "must be positive"});
        if (c.oracle.propagate_span < 0.0) d.push_back({"oracle.propagate_span", "must be non-negative"});
        if (c.oracle.metric_stride == 0) d.push_back({"oracle.metric_stride", "must be positive"});
        if (c.oracle.lr_samples < 2) d.push_back({"oracle.lr_samples", "need at least 2 samples"});
    }
    return d;
}

}  // namespace ptinv::scenario
