#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "ptinv/scenario.hpp"

namespace ptinv::scenario {

std::vector<std::string> csv_header(TargetKind target) {
    return {"t",          "sigma",       "sigma_t",   "gamma",
            "gamma_t",    "alpha_r",     "alpha_i",   "a_r",
            "b_r",        "c_r",         "c_i",       "d_r",
            "d_i",        "e_r",         "e_i",       "f_r",
            "f_i",        "lr_residual", "sym_spread", target == TargetKind::ComplexLinear ? "epsilon" : "theta2",
            "lambda",     "Ih_defect",   "h_defect",  "metric_min_eig",
            "metric_norm_drift"};
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

template <class Get>
std::optional<double> column_max(const std::vector<Row>& rows, Get get) {
    std::optional<double> out;
    for (const auto& r : rows)
        if (std::optional<double> v = get(r)) out = out ? std::max(*out, *v) : *v;
    return out;
}

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

void write_csv(const RunReport& rep, std::ostream& out) {
    const auto header = csv_header(rep.target);
    for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
    out << '\n';
    for (const Row& r : rep.rows) {
        const std::string cells[] = {num(r.t),         num(r.sigma),          num(r.sigma_t),   num(r.gamma),
                                     num(r.gamma_t),   num(r.alpha_r),        num(r.alpha_i),   num(r.a_r),
                                     num(r.b_r),       num(r.c_r),            num(r.c_i),       num(r.d_r),
                                     num(r.d_i),       num(r.e_r),            num(r.e_i),       num(r.f_r),
                                     num(r.f_i),       num(r.lr_residual),    num(r.sym_spread), num(r.theta2_or_epsilon),
                                     num(r.lambda),    num(r.Ih_defect),      num(r.h_defect),  num(r.metric_min_eig),
                                     num(r.metric_norm_drift)};
        static_assert(sizeof cells / sizeof cells[0] == 25);
        for (std::size_t k = 0; k < 25; ++k) out << (k ? "," : "") << cells[k];
        out << '\n';
    }
}

std::string summary_json(const RunReport& rep) {
    using nlohmann::json;
    const auto& rows = rep.rows;
    std::optional<double> min_eig;
    for (const auto& r : rows)
        if (r.metric_min_eig) min_eig = min_eig ? std::min(*min_eig, *r.metric_min_eig) : *r.metric_min_eig;

    json j;
    j["name"] = rep.name;
    j["target"] = to_string(rep.target);
    j["special_case"] = rep.special_case;
    j["exit_code"] = rep.exit_code;
    j["stage"] = rep.stage;
    j["message"] = rep.message;
    j["rows"] = rows.size();
    j["ode_steps"] = rep.ode_steps;
    j["max_lr_residual"] = opt(column_max(rows, [](const Row& r) { return std::optional<double>(r.lr_residual); }));
    j["max_Ih_defect"] = opt(column_max(rows, [](const Row& r) { return r.Ih_defect; }));
    j["max_h_defect"] = opt(column_max(rows, [](const Row& r) { return r.h_defect; }));
    j["max_sym_spread"] = opt(column_max(rows, [](const Row& r) { return r.sym_spread; }));
    j["metric_min_eig"] = opt(min_eig);
    j["metric_norm_drift"] = opt(column_max(rows, [](const Row& r) { return r.metric_norm_drift; }));
    j["max_imag_aux"] = rep.max_imag_aux;
    j["propagation_end"] = opt(rep.propagation_end);
    json checks = json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name},
                          {"value", std::isfinite(c.value) ? json(c.value) : json(nullptr)},
                          {"tolerance", c.tolerance},
                          {"kind", c.lower_bound ? "greater_than" : "at_most"},
                          {"stage", c.stage},
                          {"pass", c.pass}});
    j["checks"] = checks;
    return j.dump(2);
}

void write_outputs(const RunReport& rep, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const std::string base = rep.name.empty() ? "scenario" : rep.name;
    {
        std::ofstream csv(dir / (base + ".csv"));
        if (!csv) throw Error("cannot write " + (dir / (base + ".csv")).string());
        write_csv(rep, csv);
    }
    std::ofstream js(dir / (base + ".summary.json"));
    if (!js) throw Error("cannot write " + (dir / (base + ".summary.json")).string());
    js << summary_json(rep) << '\n';
}

}  // namespace ptinv::scenario
