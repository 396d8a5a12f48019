#pragma once

// Named experiments: each binds a chain, the simulation engine, the
// estimators and the exact oracle, and produces a JSON report with
// pass/fail verdicts plus CSV data files.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "lamperti/chain_models.hpp"
#include "lamperti/cli/config.hpp"
#include "lamperti/sim_engine.hpp"

namespace lamperti::cli {

struct ExperimentInfo {
    std::string_view name;
    std::string_view theorem;
    std::string_view summary;
};

/// The ten experiments, in a fixed order.
std::span<const ExperimentInfo> list_experiments();

void print_experiments(std::ostream& out);

/// Chain block: chain.family plus the family parameters.
ChainSpec parse_chain(const Config& cfg);

/// Simulation block: sim.master_seed, sim.workers, sim.excursion_cap,
/// sim.horizon, sim.grid_kmin, sim.grid_kmax, sim.alphas, sim.tracked_sites.
sim::SimConfig parse_sim(const Config& cfg, std::vector<double> default_alphas = {},
                         std::vector<double> default_sites = {});

struct Outcome {
    nlohmann::json report;
    bool pass = true;
};

/// Runs the experiment named by `experiment` and writes its files into `out`
/// (created if needed). Config problems raise ConfigError or ValidationError.
Outcome run_experiment(const Config& cfg, const std::filesystem::path& out);

enum ExitCode : int { kPass = 0, kToleranceFail = 1, kConfigError = 2, kRuntimeError = 3 };

struct RunOptions {
    std::filesystem::path config;
    std::filesystem::path out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::string> experiment;
};

/// Loads, applies overrides, runs, prints a summary to `log`; returns the exit code.
int run(const RunOptions& options, std::ostream& log);

} // namespace lamperti::cli
