#include "doctest.h"

#include "cusp/csv.hpp"
#include "cusp/experiments.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

namespace cli = cusp::cli;
namespace csv = cusp::csv;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "cusp-test-experiments" / name;
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

// Small configurations that keep each experiment under a second.
const std::map<std::string, std::vector<std::pair<std::string, std::string>>>& small_overrides() {
    static const std::map<std::string, std::vector<std::pair<std::string, std::string>>> m{
        {"gauss-stats", {{"trials", "20000"}}},
        {"khinchin", {{"trials", "5"}, {"checkpoints", "10,100"}}},
        {"ratio-dichotomy",
         {{"trials", "3"}, {"checkpoints", "10,100"}, {"walk_paths", "20"}, {"walk_steps", "5,10"},
          {"drift_step", "10"}, {"ball_radius", "8"}}},
        {"psi-average", {{"trials", "3"}, {"times", "10,100"}, {"excursions", "5"}, {"sweep_step", "0.01"}}},
        {"lyapunov", {{"trials", "3"}, {"radii", "4,6"}, {"configurations", "20"}}},
        {"cylinder-check", {{"log_theta_step", "0.5"}}},
        {"shadow-calibrate",
         {{"trials", "4"}, {"calibration", "2"}, {"ball_radius", "8"}, {"track_time", "5"}, {"shadow_rays", "5"},
          {"jump_time", "2"}}},
        {"tracking", {{"trials", "3"}, {"checkpoints", "10,20"}}},
        {"farey-count", {{"brute_max", "20"}, {"T", "50"}}},
        {"boundary-derivative", {{"trials", "20"}}},
        {"excursion-equivalence", {{"trials", "20"}, {"calibration", "10"}}},
    };
    return m;
}

cli::Config small_config(const std::string& name) {
    cli::Config cfg = cli::default_config(name);
    for (const auto& [k, v] : small_overrides().at(name)) cfg.set(k, v);
    return cfg;
}

} // namespace

TEST_CASE("csv number formatting round trips") {
    for (double x : {0.0, -1.5, 1.0 / 3.0, 6.02214076e23, 5e-324, 0.1 + 0.2}) {
        const std::string s = csv::format(x);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == x);
    }
    CHECK(csv::format(std::nan("")) == "nan");
}

TEST_CASE("csv write and read") {
    const fs::path dir = scratch("csv");
    fs::create_directories(dir);
    {
        csv::Writer w(dir / "t.csv", {"a", "b", "c"});
        w.field(1).field(std::optional<double>()).field("x");
        w.end_row();
        w.field(2.5).field(std::optional<double>(3.0)).field("y");
        w.end_row();
        w.field(1);
        CHECK_THROWS_AS(w.end_row(), csv::CsvError);
    }
    const csv::Table t = csv::read(dir / "t.csv");
    REQUIRE(t.rows.size() == 2);
    const auto b = t.numbers("b");
    CHECK_FALSE(b[0].has_value());
    CHECK(*b[1] == 3.0);
    CHECK(t.text("c")[1] == "y");
    CHECK_THROWS_AS(t.numbers("c"), csv::CsvError);
    CHECK_THROWS_AS(t.column("missing"), csv::CsvError);
}

TEST_CASE("config echo round trips and rejects bad input") {
    for (const auto& e : cli::registry()) {
        const cli::Config cfg = small_config(e.name);
        std::istringstream in(cfg.echo());
        CHECK(cli::parse_config(in) == cfg);
    }
    cli::Config cfg = cli::default_config("gauss-stats");
    cfg.set("trials", "1e6");
    CHECK(cfg.integer("trials") == 1000000);
    CHECK_THROWS_AS(cfg.set("no_such_key", "1"), cli::ConfigError);
    CHECK_THROWS_AS(cfg.set("trials", "many"), cli::ConfigError);
    CHECK_THROWS_AS(cfg.set("trials", "0"), cli::ConfigError);
    CHECK_THROWS_AS(cfg.set("trials", "2.5"), cli::ConfigError);
    CHECK_THROWS_AS(cli::default_config("no-such-experiment"), cli::ConfigError);

    std::istringstream no_name("trials = 3\n");
    CHECK_THROWS_AS(cli::parse_config(no_name), cli::ConfigError);
    std::istringstream bad_line("experiment = khinchin\nthis line has no equals sign\n");
    CHECK_THROWS_AS(cli::parse_config(bad_line), cli::ConfigError);
    std::istringstream commented("# comment\nexperiment = khinchin  # trailing\n\ntrials = 7\n");
    CHECK(cli::parse_config(commented).integer("trials") == 7);
}

TEST_CASE("registry covers criteria 1 to 15 once each") {
    std::set<std::string> names;
    std::multiset<int> ids;
    for (const auto& e : cli::registry()) {
        names.insert(e.name);
        ids.insert(e.criteria.begin(), e.criteria.end());
        CHECK_FALSE(e.outputs.empty());
        CHECK(cli::schema_help(e).find(e.name) == 0);
        CHECK(small_overrides().count(e.name) == 1);
    }
    CHECK(names.size() == cli::registry().size());
    for (int id = 1; id <= 15; ++id) CHECK(ids.count(id) == 1);
    CHECK(ids.size() == 15);
    CHECK(cli::criterion_name(16) == "reproducibility");
}

TEST_CASE("every experiment runs, verifies from its files and is reproducible") {
    for (const auto& e : cli::registry()) {
        CAPTURE(e.name);
        const cli::Config cfg = small_config(e.name);
        const fs::path a = scratch(e.name + "-a"), b = scratch(e.name + "-b");
        const cli::RunReport first = cli::run(cfg, a);
        REQUIRE(first.criteria.size() == e.criteria.size());
        for (std::size_t i = 0; i < e.criteria.size(); ++i) CHECK(first.criteria[i].id == e.criteria[i]);
        for (const auto& f : e.outputs) CHECK(fs::exists(a / f));

        const cli::Json manifest = cli::read_manifest(a);
        CHECK(manifest["experiment"] == e.name);
        CHECK(manifest["version"] == cli::kVersion);
        std::istringstream echo(manifest["config"].get<std::string>());
        CHECK(cli::parse_config(echo) == cfg);

        // verify() re-evaluates the same verdicts from disk, every time.
        for (int rep = 0; rep < 2; ++rep) {
            const auto again = cli::verify(a);
            REQUIRE(again.size() == first.criteria.size());
            for (std::size_t i = 0; i < again.size(); ++i) CHECK(again[i].pass == first.criteria[i].pass);
        }

        cli::run(cfg, b);
        for (const auto& f : e.outputs) CHECK(slurp(a / f) == slurp(b / f));
    }
}

TEST_CASE("a different seed changes the outputs") {
    cli::Config cfg = small_config("khinchin");
    const fs::path a = scratch("seed-a"), b = scratch("seed-b");
    cli::run(cfg, a);
    cfg.set("seed", "2");
    cli::run(cfg, b);
    CHECK(slurp(a / "khinchin.csv") != slurp(b / "khinchin.csv"));
}

TEST_CASE("tampered outputs fail the named criterion") {
    // Farey counts: one altered count breaks the exact-match criterion.
    const fs::path farey = scratch("tamper-farey");
    REQUIRE(cli::run(cli::default_config("farey-count"), farey).passed());
    {
        csv::Table t = csv::read(farey / "farey.csv");
        const std::size_t col = t.column("count");
        t.rows.at(16)[col] = std::to_string(std::stoll(t.rows.at(16)[col]) + 1);
        std::string text;
        for (std::size_t i = 0; i < t.header.size(); ++i) text += (i ? "," : "") + t.header[i];
        text += "\n";
        for (const auto& r : t.rows) {
            for (std::size_t i = 0; i < r.size(); ++i) text += (i ? "," : "") + r[i];
            text += "\n";
        }
        spit(farey / "farey.csv", text);
    }
    auto results = cli::verify(farey);
    CHECK(cli::exit_code(results) == cli::kCriterionFailed);
    CHECK(cli::format_results(results).find("FAIL 11 quadratic counting") != std::string::npos);

    // Expansion exponents: reversing the estimates flips the decreasing trend.
    const fs::path lyap = scratch("tamper-lyap");
    const cli::RunReport report = cli::run(cli::default_config("lyapunov"), lyap);
    REQUIRE(report.criteria.at(0).id == 13);
    REQUIRE(report.criteria.at(0).pass);
    {
        csv::Table t = csv::read(lyap / "lyap.csv");
        const std::size_t r = t.column("R");
        for (auto& row : t.rows) row[r] = row[r] == "10" ? "18" : row[r] == "18" ? "10" : row[r];
        std::string text;
        for (std::size_t i = 0; i < t.header.size(); ++i) text += (i ? "," : "") + t.header[i];
        text += "\n";
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + row[i];
            text += "\n";
        }
        spit(lyap / "lyap.csv", text);
    }
    results = cli::verify(lyap);
    CHECK(cli::format_results(results).find("FAIL 13 expansion exponent trend") != std::string::npos);
    CHECK(cli::exit_code(results) == cli::kCriterionFailed);
}

TEST_CASE("missing outputs are reported") {
    const fs::path dir = scratch("missing");
    cli::run(small_config("farey-count"), dir);
    fs::remove(dir / "farey.csv");
    CHECK_THROWS_AS(cli::verify(dir), cli::MissingOutput);
    CHECK_THROWS_AS(cli::verify(scratch("nothing-here")), cli::MissingOutput);
}
