#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ptinv/scenario.hpp"

namespace sc = ptinv::scenario;

namespace {

sc::RawConfig load_raw(const std::string& path, const std::vector<std::string>& sets) {
    sc::RawConfig raw = sc::read_raw(path);
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw sc::ValidationError("", "--set expects section.key=value, got '" + s + "'");
        sc::set_override(raw, s.substr(0, eq), s.substr(eq + 1));
    }
    return raw;
}

int cmd_validate(const std::string& path, const std::vector<std::string>& sets) {
    const sc::ScenarioConfig cfg = sc::interpret(load_raw(path, sets));
    const auto diags = sc::validate(cfg);
    if (!diags.empty()) {
        std::cerr << sc::format(diags) << '\n';
        return sc::kConfigError;
    }
    std::cout << "ok\n";
    return sc::kOk;
}

int cmd_run(const std::string& path, const std::vector<std::string>& sets, const std::string& out, bool quiet) {
    sc::ScenarioConfig cfg = sc::interpret(load_raw(path, sets));
    if (!out.empty()) cfg.output_dir = out;
    const sc::RunReport rep = sc::run(cfg);
    // a config error found during validation leaves nothing worth writing
    if (rep.exit_code != sc::kConfigError) sc::write_outputs(rep, cfg.output_dir);
    if (!quiet) {
        for (const auto& c : rep.checks)
            std::printf("%-26s %-4s %.3e %s %.1e\n", c.name.c_str(), c.pass ? "ok" : "FAIL", c.value,
                        c.lower_bound ? ">" : "<=", c.tolerance);
    }
    std::printf("%s: %s (stage %s, special case %s)\n", rep.name.c_str(), rep.exit_code == 0 ? "passed" : "failed",
                rep.stage.c_str(), rep.special_case.c_str());
    if (!rep.message.empty()) std::fprintf(stderr, "%s\n", rep.message.c_str());
    return rep.exit_code;
}

int cmd_sweep(const std::string& path, const std::vector<std::string>& sets, const std::vector<std::string>& ranges,
              const std::string& out, std::size_t workers) {
    const sc::RawConfig raw = load_raw(path, sets);
    sc::interpret(raw);  // reject a broken template before fanning out
    std::vector<sc::SweepAxis> axes;
    for (const auto& r : ranges) axes.push_back(sc::parse_range(r));
    std::optional<std::filesystem::path> dir;
    if (!out.empty()) dir = out;
    const sc::SweepReport rep = sc::sweep(raw, axes, workers, dir);
    std::cout << sc::sweep_json(rep) << '\n';
    return rep.all_passed() ? sc::kOk : sc::kToleranceViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ptinv: invariants, Dyson maps and metrics for time-dependent quadratic Hamiltonians"};
    app.require_subcommand(1);

    std::string config, out;
    std::vector<std::string> sets, ranges;
    bool quiet = false;
    std::size_t workers = 0;

    auto* v = app.add_subcommand("validate", "check a scenario config and print diagnostics");
    v->add_option("config", config, "scenario INI file")->required();
    v->add_option("--set", sets, "override section.key=value");

    auto* r = app.add_subcommand("run", "run a scenario and write <name>.csv and <name>.summary.json");
    r->add_option("config", config, "scenario INI file")->required();
    r->add_option("--out", out, "output directory (default: [output] dir)");
    r->add_option("--set", sets, "override section.key=value");
    r->add_flag("-q,--quiet", quiet, "only print the final status line");

    auto* s = app.add_subcommand("sweep", "run the Cartesian product of parameter ranges");
    s->add_option("config", config, "scenario INI template")->required();
    s->add_option("--range", ranges, "section.key=v1,v2,...")->take_all();
    s->add_option("--out", out, "write per-cell outputs here");
    s->add_option("--set", sets, "override section.key=value");
    s->add_option("--workers", workers, "worker threads (default: PTINV_WORKERS or hardware concurrency)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : sc::kConfigError;
    }

    try {
        if (*v) return cmd_validate(config, sets);
        if (*r) return cmd_run(config, sets, out, quiet);
        return cmd_sweep(config, sets, ranges, out, workers);
    } catch (const sc::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return sc::kConfigError;
    } catch (const ptinv::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return sc::kToleranceViolation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return sc::kInternalError;
    }
}
