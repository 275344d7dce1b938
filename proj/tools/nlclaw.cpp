#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nlclaw/execute.hpp"

using nlclaw::RunConfig;

int main(int argc, char** argv) {
    CLI::App app{"nonlocal conservation law laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double ode_constant = 0.0;
    bool ode_set = false;
    int trials = 0, size = 0;

    const char* commands[] = {"run",           "rate-study", "stability-study",
                              "verify-lemmas", "kuznetsov",  "bounds",
                              "picard"};
    for (const char* name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        auto* copt = sub->add_option("--config", config_path, "run configuration file")
                         ->check(CLI::ExistingFile);
        if (std::string(name) != "verify-lemmas") copt->required();
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        sub->add_option("--seed", seed, "random seed (overrides the config)")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--ode-constant", ode_constant,
                        "bound-ODE constant (overrides the config)")
            ->each([&](const std::string&) { ode_set = true; });
        if (std::string(name) == "verify-lemmas") {
            sub->add_option("--trials", trials, "randomized instances to check");
            sub->add_option("--size", size, "1-d grid size for the instances");
        }
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    RunConfig cfg;
    if (!config_path.empty()) {
        nlclaw::ParsedConfig parsed = nlclaw::parse_config(config_path);
        if (!parsed.ok()) {
            std::cerr << nlclaw::format_errors(parsed, config_path);
            return nlclaw::exit_config_error;
        }
        cfg = parsed.config;
    }
    cfg.command = command;
    if (!out_dir.empty()) cfg.output.dir = out_dir;
    if (seed_set) cfg.seed = seed;
    if (ode_set) cfg.ode_constant = ode_constant;
    if (trials > 0) cfg.lemmas.trials = trials;
    if (size > 0) cfg.lemmas.size = size;

    const auto errs = nlclaw::validate_for_command(cfg);
    if (!errs.empty()) {
        nlclaw::ParsedConfig bad{cfg, errs};
        std::cerr << nlclaw::format_errors(bad, config_path.empty() ? command
                                                                    : config_path);
        return nlclaw::exit_config_error;
    }

    try {
        const int code = nlclaw::execute(cfg, config_path);
        std::cout << command << ": wrote " << cfg.output.dir
                  << "/manifest.json (exit " << code << ")\n";
        return code;
    } catch (const nlclaw::error& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return nlclaw::exit_config_error;
    }
}
