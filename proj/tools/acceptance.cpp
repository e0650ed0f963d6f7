// Runs every registered experiment at its default (full) scale, prints one
// PASS/FAIL line per acceptance criterion and checks that a second run of each
// experiment reproduces its outputs byte for byte.

#include "cusp/experiments.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>

namespace cli = cusp::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance suite: all experiments at full scale"};
    std::string out = (fs::temp_directory_path() / "cusp-acceptance").string();
    std::string report;
    bool keep = false;
    app.add_option("--out", out, "working directory for the runs");
    app.add_option("--report", report, "also write the criterion table to this file");
    app.add_flag("--keep", keep, "keep the run directories");
    CLI11_PARSE(app, argc, argv);

    const fs::path root(out);
    fs::remove_all(root);

    std::map<int, cli::CriterionResult> results;
    std::vector<std::string> mismatches;
    std::size_t compared = 0;
    try {
        for (const cli::Experiment& e : cli::registry()) {
            const cli::Config cfg = cli::default_config(e.name);
            const cli::RunReport first = cli::run(cfg, root / "first" / e.name);
            std::cerr << e.name << ": " << first.wall_time << " s\n";
            for (const auto& r : first.criteria) results[r.id] = r;

            cli::run(cfg, root / "second" / e.name);
            for (const auto& f : e.outputs) {
                ++compared;
                if (slurp(root / "first" / e.name / f) != slurp(root / "second" / e.name / f))
                    mismatches.push_back(e.name + "/" + f);
            }
        }
    } catch (const std::exception& ex) {
        std::cerr << "acceptance run aborted: " << ex.what() << "\n";
        return cli::kInvalidInput;
    }

    std::string detail = std::to_string(compared - mismatches.size()) + "/" + std::to_string(compared) +
                         " output files byte-identical across two runs";
    for (const auto& m : mismatches) detail += "; differs: " + m;
    results[16] = {16, cli::criterion_name(16), mismatches.empty() && compared > 0, detail};

    std::vector<cli::CriterionResult> ordered;
    for (int id = 1; id <= 16; ++id) {
        if (auto it = results.find(id); it != results.end())
            ordered.push_back(it->second);
        else
            ordered.push_back({id, cli::criterion_name(id), false, "not evaluated by any experiment"});
    }
    const auto passed = std::count_if(ordered.begin(), ordered.end(), [](const auto& r) { return r.pass; });
    const std::string table = cli::format_results(ordered) + "criteria evaluated: " + std::to_string(results.size()) +
                              "\ncriteria passed: " + std::to_string(passed) + "/16\n";
    std::cout << table;
    if (!report.empty()) std::ofstream(report, std::ios::binary) << table;

    if (!keep) fs::remove_all(root);
    return cli::exit_code(ordered);
}
