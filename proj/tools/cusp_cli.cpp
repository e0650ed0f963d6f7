#include "cusp/experiments.hpp"
#include "cusp/group.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

namespace cli = cusp::cli;

namespace {

cli::Config build_config(const std::string& name, const std::string& config_file,
                         const std::vector<std::string>& sets, const std::string& seed, const std::string& trials) {
    cli::Config cfg = cli::default_config(name);
    if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in) throw cli::ConfigError("cannot open config file " + config_file);
        cfg = cli::parse_config(in);
        if (cfg.experiment() != name)
            throw cli::ConfigError("config file is for '" + cfg.experiment() + "', not '" + name + "'");
    }
    for (const std::string& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw cli::ConfigError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!seed.empty()) cfg.set("seed", seed);
    if (!trials.empty()) cfg.set("trials", trials);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Experiments on word metrics, cusp excursions and random walks in Fuchsian groups"};
    app.set_version_flag("--version", cli::kVersion);
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "list the experiments");

    std::string schema_name;
    auto* schema = app.add_subcommand("schema", "show the config keys of an experiment");
    schema->add_option("experiment", schema_name)->required();

    std::string run_name, out_dir, config_file, seed, trials;
    std::vector<std::string> sets;
    bool dry_run = false;
    auto* run = app.add_subcommand("run", "run an experiment and verify its criteria");
    run->add_option("experiment", run_name)->required();
    run->add_option("--out", out_dir, "output directory (default runs/<experiment>-seed<seed>)");
    run->add_option("--config", config_file, "config file of key = value lines");
    run->add_option("--set", sets, "override one key, key=value; repeatable");
    run->add_option("--seed", seed, "base seed");
    run->add_option("--trials", trials, "number of trials");
    run->add_flag("--print-config", dry_run, "print the resolved config and exit");

    std::string verify_dir;
    auto* verify = app.add_subcommand("verify", "re-evaluate the criteria of a finished run from its files");
    verify->add_option("dir", verify_dir)->required()->check(CLI::ExistingDirectory);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kInvalidInput;
    }

    try {
        if (list->parsed()) {
            for (const auto& e : cli::registry()) {
                std::cout << e.name << "  criteria";
                for (int c : e.criteria) std::cout << ' ' << c;
                std::cout << "  " << e.description << "\n";
            }
            return cli::kSuccess;
        }
        if (schema->parsed()) {
            std::cout << cli::schema_help(cli::find_experiment(schema_name));
            return cli::kSuccess;
        }
        if (run->parsed()) {
            const cli::Config cfg = build_config(run_name, config_file, sets, seed, trials);
            if (dry_run) {
                std::cout << cfg.echo();
                return cli::kSuccess;
            }
            if (out_dir.empty()) out_dir = "runs/" + run_name + "-seed" + std::to_string(cfg.seed());
            const cli::RunReport report = cli::run(cfg, out_dir);
            std::cout << "wrote " << report.dir.string() << " in " << report.wall_time << " s\n";
            std::cout << cli::format_results(report.criteria);
            return cli::exit_code(report.criteria);
        }
        if (verify->parsed()) {
            const auto results = cli::verify(verify_dir);
            std::cout << cli::format_results(results);
            return cli::exit_code(results);
        }
    } catch (const cusp::group::ResourceError& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return cli::kResourceExceeded;
    } catch (const cli::ConfigError& e) {
        std::cerr << "config: " << e.what() << "\n";
        return cli::kInvalidInput;
    } catch (const cli::MissingOutput& e) {
        std::cerr << "missing output: " << e.what() << "\n";
        return cli::kInvalidInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return cli::kInvalidInput;
    }
    return cli::kInvalidInput;
}
