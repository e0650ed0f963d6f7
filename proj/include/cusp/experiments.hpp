#pragma once

// Registry of reproducible experiments. Each run writes CSV tables and a
// manifest.json (config echo, version, wall time, fitted constants and the
// acceptance criteria it evaluates) into its output directory. Criteria are
// re-evaluated from the files alone by verify().

#include "cusp/config.hpp"

#include "json.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace cusp::cli {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

inline constexpr const char* kVersion = "1.0.0";

class MissingOutput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum ExitCode : int { kSuccess = 0, kCriterionFailed = 1, kInvalidInput = 2, kResourceExceeded = 3 };

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Short name of acceptance criterion 1..16.
std::string criterion_name(int id);

struct RunContext {
    fs::path dir;
    Json summary = Json::object(); // fitted constants and headline numbers
    Json timings = Json::object(); // seconds per stage; not part of any CSV

    fs::path file(const std::string& name) const { return dir / name; }
};

struct Experiment {
    std::string name;
    std::string description;
    Schema schema;
    std::vector<int> criteria;
    std::vector<std::string> outputs; // CSV files written into the run directory
    std::function<void(const Config&, RunContext&)> run;
    /// Evaluates the criteria from the CSV outputs and the manifest.
    std::function<std::vector<CriterionResult>(const fs::path& dir, const Json& manifest)> verify;
};

const std::vector<Experiment>& registry();
/// Throws ConfigError for an unknown name.
const Experiment& find_experiment(const std::string& name);

Config default_config(const std::string& experiment);
/// Reads a config file; its "experiment" key selects the schema. Keys may
/// appear in any order; later keys override earlier ones.
Config parse_config(std::istream& in);
/// Schema listing: key, type, default and help for every key.
std::string schema_help(const Experiment& e);

struct RunReport {
    Config config;
    fs::path dir;
    double wall_time = 0.0;
    Json summary;
    std::vector<CriterionResult> criteria;

    bool passed() const;
};

/// Runs into `dir` (created if needed), writes manifest.json and evaluates
/// the experiment's criteria from the written files.
RunReport run(const Config& config, const fs::path& dir);

Json read_manifest(const fs::path& dir);
/// Throws MissingOutput if the manifest or an output is absent.
std::vector<CriterionResult> verify(const fs::path& dir);

/// One line per criterion: "PASS  3 gauss statistics: detail".
std::string format_results(const std::vector<CriterionResult>& results);
int exit_code(const std::vector<CriterionResult>& results);

} // namespace cusp::cli
