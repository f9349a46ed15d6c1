#include "mtphase/commands.hpp"
#include "mtphase/config.hpp"
#include "mtphase/sweep.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace mtphase;

    CLI::App app{"mtphase: thresholds, transitions and simulations for the microtubule reaction-diffusion model"};
    app.set_version_flag("--version", MTPHASE_VERSION);

    std::string subcommand;
    std::string config_path;
    std::string out_dir;
    std::optional<int> workers;
    std::optional<std::uint64_t> seed;

    std::vector<std::string> names(kSubcommands.begin(), kSubcommands.end());
    app.add_option("subcommand", subcommand, "One of: steady-state, spectrum, threshold, transition, simulate, "
                                             "phase-diagram, verify")
        ->required()
        ->check(CLI::IsMember(names));
    app.add_option("--config", config_path, "INI configuration file")->required();
    app.add_option("--out", out_dir, "Output directory (overrides [output] directory)");
    app.add_option("--workers", workers, "Worker threads (default: $MTPHASE_WORKERS, else hardware concurrency)")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Seed for random initial conditions and sampled checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    RunConfig config;
    try {
        config = parse_config(config_path);
    } catch (const Error& e) {
        std::cerr << "config error: " << error_code_name(e.code()) << ": " << e.what() << "\n";
        return kExitConfig;
    }

    CommandOptions options;
    if (!out_dir.empty()) options.out_dir = out_dir;
    options.workers = resolve_workers(workers);
    options.seed = seed;
    return run_subcommand(subcommand, config, options, std::cerr);
}
