#include <atomic>
#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "ptinv/scenario.hpp"

namespace ptinv::scenario {

SweepAxis parse_range(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("", "range must look like section.key=v1,v2,...");
    SweepAxis axis{text.substr(0, eq), {}};
    const std::string rest = text.substr(eq + 1);
    std::size_t start = 0;
    while (start < rest.size()) {
        auto comma = rest.find(',', start);
        if (comma == std::string::npos) comma = rest.size();
        std::string v = rest.substr(start, comma - start);
        if (v.empty()) throw ValidationError(axis.key, "empty value in range");
        axis.values.push_back(v);
        start = comma + 1;
    }
    return axis;
}

bool SweepReport::all_passed() const {
    for (const auto& c : cells)
        if (c.exit_code != kOk) return false;
    return true;
}

std::size_t default_workers() {
    if (const char* env = std::getenv("PTINV_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SweepReport sweep(const RawConfig& base, const std::vector<SweepAxis>& axes, std::size_t workers,
                  const std::optional<std::filesystem::path>& out_dir) {
    SweepReport rep;
    std::size_t total = 1;
    for (const auto& a : axes) total *= a.values.size();
    if (total == 0) return rep;

    rep.cells.resize(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        auto& cell = rep.cells[idx];
        // last axis varies fastest
        for (std::size_t k = axes.size(); k-- > 0;) {
            const auto& a = axes[k];
            cell.assignment.insert(cell.assignment.begin(), {a.key, a.values[rem % a.values.size()]});
            rem /= a.values.size();
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t idx = next++; idx < total; idx = next++) {
            SweepCell& cell = rep.cells[idx];
            try {
                RawConfig raw = base;
                for (const auto& [k, v] : cell.assignment) set_override(raw, k, v);
                ScenarioConfig cfg = interpret(raw);
                cfg.name += "_" + std::to_string(idx);
                RunReport r = run(cfg);
                cell.exit_code = r.exit_code;
                cell.stage = r.stage;
                cell.message = r.message;
                cell.special_case = r.special_case;
                if (out_dir) write_outputs(r, *out_dir);
            } catch (const ValidationError& e) {
                cell.exit_code = kConfigError;
                cell.stage = "validate";
                cell.message = e.what();
            } catch (const std::exception& e) {
                cell.exit_code = kInternalError;
                cell.stage = "sweep";
                cell.message = e.what();
            }
        }
    };
    const std::size_t n = std::min(total, workers == 0 ? default_workers() : workers);
    std::vector<std::thread> pool;
    for (std::size_t k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return rep;
}

std::string sweep_json(const SweepReport& rep) {
    using nlohmann::json;
    json cells = json::array();
    for (const auto& c : rep.cells) {
        json a = json::object();
        for (const auto& [k, v] : c.assignment) a[k] = v;
        cells.push_back({{"assignment", a},
                         {"exit_code", c.exit_code},
                         {"stage", c.stage},
                         {"special_case", c.special_case},
                         {"message", c.message}});
    }
    return json{{"cells", cells}, {"all_passed", rep.all_passed()}}.dump(2);
}

}  // namespace ptinv::scenario
