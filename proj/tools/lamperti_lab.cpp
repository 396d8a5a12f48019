#include <iostream>

#include <CLI11.hpp>

#include "lamperti/cli/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Simulation and verification lab for Lamperti-type processes"};
    app.require_subcommand(1);

    lamperti::cli::RunOptions opts;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    std::string experiment;
    auto* run = app.add_subcommand("run", "run one experiment from a config file");
    run->add_option("--config", opts.config, "experiment config (key = value lines)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", opts.out, "output directory for report.json and CSV files")->default_val(".");
    auto* seed_opt = run->add_option("--seed", seed, "override sim.master_seed");
    auto* workers_opt = run->add_option("--workers", workers, "override sim.workers")->check(CLI::PositiveNumber);
    auto* exp_opt = run->add_option("--experiment", experiment, "override the experiment name");

    app.add_subcommand("list", "list the available experiments");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : lamperti::cli::kConfigError;
    }

    if (app.got_subcommand("list")) {
        lamperti::cli::print_experiments(std::cout);
        return 0;
    }
    if (*seed_opt) opts.seed = seed;
    if (*workers_opt) opts.workers = workers;
    if (*exp_opt) opts.experiment = experiment;
    return lamperti::cli::run(opts, std::cout);
}
