#include "cusp/experiments.hpp"

#include "experiment_support.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace cusp::cli {

namespace detail {

csv::Table load(const fs::path& dir, const std::string& file) {
    const fs::path p = dir / file;
    if (!fs::exists(p)) throw MissingOutput("missing output " + p.string());
    try {
        return csv::read(p);
    } catch (const csv::CsvError& e) {
        throw MissingOutput(e.what());
    }
}

std::vector<double> column(const csv::Table& t, const std::string& name) {
    std::vector<double> out;
    try {
        for (const auto& v : t.numbers(name)) {
            if (!v) throw MissingOutput("column " + name + " has an empty field");
            out.push_back(*v);
        }
    } catch (const csv::CsvError& e) {
        throw MissingOutput(e.what());
    }
    return out;
}

std::vector<double> select(const csv::Table& t, const std::string& key, double k, const std::string& value) {
    const auto keys = column(t, key);
    std::vector<std::optional<double>> vals;
    try {
        vals = t.numbers(value);
    } catch (const csv::CsvError& e) {
        throw MissingOutput(e.what());
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < keys.size(); ++i)
        if (keys[i] == k && vals[i]) out.push_back(*vals[i]);
    return out;
}

std::vector<double> present(const std::vector<std::optional<double>>& xs) {
    std::vector<double> out;
    for (const auto& x : xs)
        if (x) out.push_back(*x);
    return out;
}

double timing(const Json& manifest, const std::string& stage) {
    if (!manifest.contains("timings") || !manifest["timings"].contains(stage))
        throw MissingOutput("manifest has no timing for " + stage);
    return manifest["timings"][stage].get<double>();
}

Config manifest_config(const Json& manifest) {
    if (!manifest.contains("config") || !manifest["config"].is_string())
        throw MissingOutput("manifest has no config echo");
    std::istringstream in(manifest["config"].get<std::string>());
    try {
        return parse_config(in);
    } catch (const ConfigError& e) {
        throw MissingOutput(std::string("manifest config: ") + e.what());
    }
}

CriterionResult result(int id, bool pass, const std::string& detail) {
    return {id, criterion_name(id), pass, detail};
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

} // namespace detail

std::string criterion_name(int id) {
    static const char* names[] = {
        "",
        "boundary derivative",
        "displacement identity",
        "Gauss statistics",
        "Khinchin divergence",
        "Lebesgue ratio growth",
        "harmonic ratio stabilization",
        "drift positivity",
        "sublinear tracking",
        "flat-cylinder identities",
        "excursion-definition equivalence",
        "quadratic counting",
        "entry-point stability",
        "expansion exponent trend",
        "coarse monotonicity and excursion bound",
        "psi machinery",
        "reproducibility",
    };
    if (id < 1 || id > 16) return "unknown";
    return names[id];
}

const std::vector<Experiment>& registry() {
    static const std::vector<Experiment> all = [] {
        using namespace detail;
        return std::vector<Experiment>{
            gauss_stats_experiment(),          khinchin_experiment(),
            ratio_dichotomy_experiment(),      psi_average_experiment(),
            lyapunov_experiment(),             cylinder_check_experiment(),
            shadow_calibrate_experiment(),     tracking_experiment(),
            farey_count_experiment(),          boundary_derivative_experiment(),
            excursion_equivalence_experiment(),
        };
    }();
    return all;
}

const Experiment& find_experiment(const std::string& name) {
    for (const Experiment& e : registry())
        if (e.name == name) return e;
    throw ConfigError("unknown experiment '" + name + "'");
}

Config default_config(const std::string& experiment) {
    const Experiment& e = find_experiment(experiment);
    return Config(e.name, e.schema);
}

Config parse_config(std::istream& in) {
    const auto pairs = read_pairs(in);
    std::string name;
    for (const auto& [k, v] : pairs)
        if (k == "experiment") name = v;
    if (name.empty()) throw ConfigError("config has no 'experiment' key");
    Config cfg = default_config(name);
    for (const auto& [k, v] : pairs) {
        if (k == "experiment") {
            if (v != name) throw ConfigError("config names two experiments");
            continue;
        }
        cfg.set(k, v);
    }
    return cfg;
}

std::string schema_help(const Experiment& e) {
    std::ostringstream out;
    out << e.name << ": " << e.description << "\n";
    out << "  criteria:";
    for (int c : e.criteria) out << ' ' << c;
    out << "\n  outputs:";
    for (const auto& f : e.outputs) out << ' ' << f;
    out << " manifest.json\n  keys:\n";
    for (const KeySpec& k : e.schema) {
        out << "    " << k.name << " (" << to_string(k.type) << (k.positive ? ", positive" : "")
            << ") default " << k.fallback << "\n      " << k.help << "\n";
    }
    return out.str();
}

bool RunReport::passed() const { return exit_code(criteria) == kSuccess; }

RunReport run(const Config& config, const fs::path& dir) {
    const Experiment& e = find_experiment(config.experiment());
    fs::create_directories(dir);
    RunContext ctx;
    ctx.dir = dir;
    const detail::Stopwatch clock;
    e.run(config, ctx);

    RunReport report;
    report.config = config;
    report.dir = dir;
    report.wall_time = clock.seconds();
    report.summary = ctx.summary;

    Json manifest;
    manifest["experiment"] = e.name;
    manifest["version"] = kVersion;
    manifest["config"] = config.echo();
    manifest["wall_time_seconds"] = report.wall_time;
    manifest["timings"] = ctx.timings;
    manifest["summary"] = ctx.summary;
    manifest["outputs"] = e.outputs;
    {
        std::ofstream out(dir / "manifest.json", std::ios::binary);
        out << manifest.dump(2) << "\n";
    }
    report.criteria = e.verify(dir, manifest);
    Json crit = Json::array();
    for (const auto& c : report.criteria)
        crit.push_back({{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    manifest["criteria"] = crit;
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << "\n";
    return report;
}

Json read_manifest(const fs::path& dir) {
    const fs::path p = dir / "manifest.json";
    std::ifstream in(p);
    if (!in) throw MissingOutput("missing manifest " + p.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& ex) {
        throw MissingOutput(p.string() + ": " + ex.what());
    }
}

std::vector<CriterionResult> verify(const fs::path& dir) {
    const Json manifest = read_manifest(dir);
    if (!manifest.contains("experiment")) throw MissingOutput("manifest has no experiment name");
    const Experiment& e = find_experiment(manifest["experiment"].get<std::string>());
    for (const auto& f : e.outputs)
        if (!fs::exists(dir / f)) throw MissingOutput("missing output " + (dir / f).string());
    return e.verify(dir, manifest);
}

std::string format_results(const std::vector<CriterionResult>& results) {
    std::string out;
    for (const auto& r : results) {
        char head[64];
        std::snprintf(head, sizeof head, "%s %2d ", r.pass ? "PASS" : "FAIL", r.id);
        out += head + r.name + ": " + r.detail + "\n";
    }
    return out;
}

int exit_code(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return kCriterionFailed;
    return kSuccess;
}

} // namespace cusp::cli
