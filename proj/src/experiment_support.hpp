#pragma once

// Shared pieces of the experiment implementations. Not installed.

#include "cusp/csv.hpp"
#include "cusp/experiments.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace cusp::cli::detail {

Experiment boundary_derivative_experiment();
Experiment excursion_equivalence_experiment();
Experiment cylinder_check_experiment();
Experiment gauss_stats_experiment();
Experiment khinchin_experiment();
Experiment farey_count_experiment();
Experiment ratio_dichotomy_experiment();
Experiment psi_average_experiment();
Experiment tracking_experiment();
Experiment lyapunov_experiment();
Experiment shadow_calibrate_experiment();

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

/// Table from the run directory; MissingOutput if the file is absent or unreadable.
csv::Table load(const fs::path& dir, const std::string& file);
/// Numeric column with every field present; MissingOutput otherwise.
std::vector<double> column(const csv::Table& t, const std::string& name);
/// Rows of column `value` whose column `key` equals k.
std::vector<double> select(const csv::Table& t, const std::string& key, double k, const std::string& value);
std::vector<double> present(const std::vector<std::optional<double>>& xs);

/// Config echoed in the manifest; MissingOutput if absent or unreadable.
Config manifest_config(const Json& manifest);

/// Seconds recorded for a stage in the manifest; MissingOutput if absent.
double timing(const Json& manifest, const std::string& stage);

CriterionResult result(int id, bool pass, const std::string& detail);
/// Compact number formatting for report details.
std::string num(double x);

} // namespace cusp::cli::detail
