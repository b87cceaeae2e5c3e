#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "acceptance.h"
#include "synmix/error.h"
#include "synmix/experiment/config.h"
#include "synmix/experiment/runner.h"

namespace {

int run_command(const std::string& config_path, const std::vector<std::string>& overrides, bool dry_run)
{
    using namespace synmix::experiment;
    ExperimentConfig cfg = parse_config_file(config_path);
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw synmix::InvalidArgument("--set expects key=value, got '" + kv + "'");
        }
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();
    const auto dir = cfg.output_dir();
    if (dry_run) {
        std::cout << cfg.to_json().dump(2) << '\n' << "output: " << dir.string() << '\n';
        return 0;
    }
    std::cerr << "running " << cfg.experiment() << " -> " << dir.string() << '\n';
    const auto bundle = run_experiment(cfg);
    for (const auto& f : write_bundle(bundle, dir)) {
        std::cout << f.string() << '\n';
    }
    return 0;
}

int list_command(bool verbose)
{
    using namespace synmix::experiment;
    for (const auto& name : experiment_names()) {
        std::cout << name << "  " << experiment_description(name) << '\n';
        if (!verbose) {
            continue;
        }
        for (const auto& p : experiment_params(name)) {
            std::cout << "    " << p.key << " = " << format_value(p.default_value) << "  # " << p.help << '\n';
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Posterior mixing over noise-aware synthetic data: experiments and acceptance checks"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    std::string config_path;
    std::vector<std::string> overrides;
    bool dry_run = false;
    run->add_option("config", config_path, "Config file (key = value lines, 'include <file>')")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--set", overrides, "Override a config key, key=value (repeatable)");
    run->add_flag("--dry-run", dry_run, "Print the resolved config and output directory, then exit");

    auto* list = app.add_subcommand("list-experiments", "List experiment names");
    bool verbose = false;
    list->add_flag("-v,--verbose", verbose, "Also list each experiment's keys and defaults");

    auto* acc = app.add_subcommand("test-acceptance", "Run the acceptance criteria");
    std::vector<int> only;
    std::vector<int> known_fail;
    bool list_criteria = false;
    acc->add_option("criteria", only, "Criterion ids to run (default: all)");
    acc->add_flag("--list", list_criteria, "List criteria and their runtime budgets");
    acc->add_option("--known-fail", known_fail, "Criterion ids recorded as unattainable (still reported as FAIL)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            return run_command(config_path, overrides, dry_run);
        }
        if (*list) {
            return list_command(verbose);
        }
        if (list_criteria) {
            for (const auto& c : synmix::acceptance::criteria()) {
                std::cout << c.id << "  " << c.name << "  (budget " << c.budget_seconds << " s)\n";
            }
            return 0;
        }
        synmix::acceptance::Options options;
        options.only = std::set<int>(only.begin(), only.end());
        const std::set<int> known(known_fail.begin(), known_fail.end());
        const auto outcomes = synmix::acceptance::run(options, std::cout);
        synmix::acceptance::print_totals(outcomes, known, std::cout);
        return synmix::acceptance::exit_code(outcomes, known);
    } catch (const std::exception& e) {
        std::cerr << "synmix: " << e.what() << '\n';
        return 1;
    }
}
