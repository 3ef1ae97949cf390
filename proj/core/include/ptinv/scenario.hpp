#pragma once

// Scenario-driven pipeline: INI config -> aux ODE -> invariant -> Dyson map
// -> matrix oracle -> CSV + summary JSON, plus parameter sweeps.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "ptinv/auxode.hpp"
#include "ptinv/errors.hpp"
#include "ptinv/pointtrans.hpp"

namespace ptinv::scenario {

inline constexpr int kSchemaVersion = 1;

struct Diagnostic {
    std::string path;  // "section.key", or "" for file-level problems
    std::string message;
};

std::string format(const std::vector<Diagnostic>& diags);

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Diagnostic> diags)
        : Error(format(diags)), diags_(std::move(diags)) {}
    ValidationError(std::string path, std::string message)
        : ValidationError(std::vector<Diagnostic>{{std::move(path), std::move(message)}}) {}
    const std::vector<Diagnostic>& diagnostics() const { return diags_; }

private:
    std::vector<Diagnostic> diags_;
};

// Pass/fail limits applied by run(); every field can be set in [tolerances].
struct Budget {
    double lr = 1e-8;            // coefficient-level LR residual of I_H
    double hermiticity = 1e-10;  // Hermiticity defect of I_h (h is held to closed_form)
    double closed_form = 1e-8;   // h and the I_h x^2 shift against their closed expressions
    double symmetry = 1e-9;      // relative spread of the symmetry ratios
    double identity = 1e-9;      // complex linear e_i identity (relative)
    double generic = 1e-8;       // Newton solver against the closed-form map
    double hermitian_lr = 1e-7;  // LR residual of I_h with h
    double matrix = 1e-8;        // matrix-level LR residual against the coefficient level
    double metric_drift = 1e-6;
    double intertwining = 1e-5;
    double control_norm = 1e-10;  // plain norm drift when H itself is Hermitian
};

struct OracleConfig {
    bool enabled = true;
    std::size_t N = 128;
    std::size_t N_trust = 32;
    double m0 = 1.0;
    double omega0 = 1.0;
    double cn_dt = 1e-3;
    double propagate_span = 5.0;  // propagation covers [t0, min(t1, t0 + span)]; 0 disables it
    std::size_t metric_stride = 1;  // metric eigenvalue on every k-th row (and the last)
    std::size_t lr_samples = 51;    // matrix LR check on this many uniform times
};

struct ScenarioConfig {
    int schema_version = kSchemaVersion;
    std::string name;
    PointTransformSpec spec;
    AuxInitial initial;
    Window window{0.0, 10.0};
    std::size_t grid = 201;  // uniform report points merged with accepted steps
    Tolerances ode;
    Budget budget;
    OracleConfig oracle;
    std::filesystem::path output_dir = ".";
};

using RawConfig = boost::property_tree::ptree;

// Throws ValidationError (path "" and the line number) on malformed INI.
RawConfig parse_raw(std::istream& in, const std::string& source = "<config>");
RawConfig read_raw(const std::filesystem::path& path);
// "section.key" = value; a key without a dot addresses the top level.
void set_override(RawConfig& raw, const std::string& key, const std::string& value);

// Typed interpretation; unknown keys, bad numbers and bad expressions are
// collected. Throws ValidationError with every diagnostic found.
ScenarioConfig interpret(const RawConfig& raw);
ScenarioConfig load(const std::filesystem::path& path);

// Semantic checks on a typed config (pairing, exponents, sigma_0, alpha_r
// zeros on a coarse grid, oracle sizes). Empty means ok.
std::vector<Diagnostic> validate(const ScenarioConfig& cfg);

// CSV row; nullopt fields are written empty.
struct Row {
    double t = 0.0;
    double sigma = 0.0, sigma_t = 0.0, gamma = 0.0, gamma_t = 0.0;
    std::optional<double> alpha_r, alpha_i;
    double a_r = 0.0, b_r = 0.0, c_r = 0.0, c_i = 0.0, d_r = 0.0, d_i = 0.0, e_r = 0.0, e_i = 0.0, f_r = 0.0, f_i = 0.0;
    double lr_residual = 0.0;
    std::optional<double> sym_spread;
    std::optional<double> theta2_or_epsilon, lambda;
    std::optional<double> Ih_defect, h_defect;
    std::optional<double> metric_min_eig, metric_norm_drift;
};

struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    // value <= tolerance, except for lower bounds (metric eigenvalue > 0)
    bool lower_bound = false;
    std::string stage;  // pipeline stage that produced the check
};

enum ExitCode : int { kOk = 0, kToleranceViolation = 1, kConfigError = 2, kInternalError = 3 };

struct RunReport {
    std::string name;
    TargetKind target = TargetKind::SwansonVariableMass;
    std::string special_case = "none";
    std::string stage = "done";  // stage reached, or the stage that failed
    std::string message;
    int exit_code = kOk;
    std::vector<Row> rows;
    std::vector<Check> checks;
    std::size_t ode_steps = 0;
    double max_imag_aux = 0.0;  // max |Im| of sigma, gamma (complex field mode)
    std::optional<double> propagation_end;
};

RunReport run(const ScenarioConfig& cfg);

// Column names in CSV order. Position 20 is "theta2" for Swanson targets and
// "epsilon" for the complex linear target.
std::vector<std::string> csv_header(TargetKind target);
void write_csv(const RunReport& rep, std::ostream& out);
// Summary aggregates are recomputed from rep.rows.
std::string summary_json(const RunReport& rep);
// Writes <dir>/<name>.csv and <dir>/<name>.summary.json.
void write_outputs(const RunReport& rep, const std::filesystem::path& dir);

struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

// "section.key=v1,v2,..."; an empty value list is allowed.
SweepAxis parse_range(const std::string& text);

struct SweepCell {
    std::vector<std::pair<std::string, std::string>> assignment;
    int exit_code = kOk;
    std::string stage;
    std::string message;
    std::string special_case;
};

struct SweepReport {
    std::vector<SweepCell> cells;
    bool all_passed() const;
};

// Cartesian product of the axes, cells run on `workers` threads (0 means
// PTINV_WORKERS or the hardware concurrency). Cell failures are recorded and
// the sweep continues. With an output dir every cell writes its files under
// the name <name>_<index>.
SweepReport sweep(const RawConfig& base, const std::vector<SweepAxis>& axes, std::size_t workers = 0,
                  const std::optional<std::filesystem::path>& out_dir = std::nullopt);
std::size_t default_workers();
std::string sweep_json(const SweepReport& rep);

}  // namespace ptinv::scenario
