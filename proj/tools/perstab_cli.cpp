// Command-line front end: perstab <command> --config FILE [--out DIR] [--seed N] [--trials N]

#include "perstab/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Stability experiments for viscous conservation laws with periodic flux"};
    app.require_subcommand(1);

    std::string config;
    perstab::CommandOverrides overrides;
    std::string out;
    std::uint64_t seed = 0;
    int trials = 0;

    const char* commands[][2] = {
        {"stationary", "build and check the stationary family, write family.json"},
        {"evolve", "run the scenario, write diagnostics, entropy and snapshot CSVs"},
        {"verify", "seeded comparison / contraction / conservation trials"},
        {"dispersion", "fit the L2 decay exponent on the configured window"},
        {"lap", "lap-number, L1-bound and decay-target checks"},
    };
    for (auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", config, "scenario JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--out", out, "output directory (overrides the config)");
        sub->add_option("--seed", seed, "seed for initial data and verify trials");
        if (std::string(name) == "verify") {
            sub->add_option("--trials", trials, "number of verify trials")->check(CLI::PositiveNumber);
        }
    }
    CLI11_PARSE(app, argc, argv);

    CLI::App* chosen = app.get_subcommands().front();
    if (!out.empty()) overrides.out = out;
    if (chosen->count("--seed")) overrides.seed = seed;
    if (chosen->get_option_no_throw("--trials") && chosen->count("--trials")) overrides.trials = trials;

    const int code = perstab::run_command(chosen->get_name(), config, overrides);
    const char* meaning[] = {"pass", "check failed", "config error", "solver error",
                             "edge-buffer violation"};
    std::cerr << chosen->get_name() << ": " << meaning[code] << " (exit " << code << ")\n";
    return code;
}
