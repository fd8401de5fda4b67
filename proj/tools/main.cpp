#include <cstdint>
#include <string>

#include "CLI11.hpp"
#include "abcx/runner.hpp"

namespace {

void add_common(CLI::App* cmd, abcx::RunOptions& options) {
    cmd->add_option("--config", options.config_path, "Path to the JSON run configuration")
        ->required();
    cmd->add_option("--out", options.out_dir, "Output directory (overrides output.dir)");
    cmd->add_option("--threads", options.threads, "Worker threads for trials and sweep points")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", options.seed_override, "Seed override for simulation commands");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"abcx: error/erasure exponents and decoder simulation for broadcast channels "
                 "with degraded message sets"};
    app.require_subcommand(1);

    abcx::RunOptions options;
    int (*run)(const abcx::RunOptions&) = nullptr;

    CLI::App* exponents = app.add_subcommand(
        "exponents", "Evaluate the four decoder exponent bounds for one operating point");
    add_common(exponents, options);
    exponents->callback([&] { run = abcx::cmd_exponents; });

    CLI::App* simulate = app.add_subcommand(
        "simulate", "Monte Carlo decoder simulation across the configured blocklengths");
    add_common(simulate, options);
    simulate->callback([&] { run = abcx::cmd_simulate; });

    CLI::App* sweep =
        app.add_subcommand("sweep", "Exponent bounds along a grid over one rate field");
    add_common(sweep, options);
    sweep->callback([&] { run = abcx::cmd_sweep; });

    CLI::App* verify = app.add_subcommand(
        "verify", "Cross-check the solver, simulator and decoder against exhaustive oracles");
    add_common(verify, options);
    verify->callback([&] { run = abcx::cmd_verify; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_name() == "CallForHelp" ? abcx::kExitOk : abcx::kExitConfig;
    }
    return run(options);
}
