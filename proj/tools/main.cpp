#include "cli_common.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace dispersio::cli;

int main(int argc, char** argv) {
    CLI::App app{"dispersio command-line driver"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out = "out";
    std::string config;
    std::uint64_t seed = 1;
    int workers = 1;
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed");
    auto* workers_opt = app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", out, "output directory");
    app.add_option("--config", config, "flat key=value config file");

    using Cmd = int (*)(const Context&);
    const std::vector<std::pair<std::string, Cmd>> table = {
        {"verify-symbol", cmd_verify_symbol}, {"decay-sweep", cmd_decay_sweep}, {"strichartz", cmd_strichartz},
        {"lifespan", cmd_lifespan},           {"constants", cmd_constants}};
    std::vector<std::pair<CLI::App*, Cmd>> subs;
    for (const auto& [name, fn] : table) subs.emplace_back(app.add_subcommand(name), fn);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kConfigError;
    }

    try {
        Context c;
        if (!config.empty()) c.cfg = dispersio::FlatConfig::load(config);
        c.seed = static_cast<std::uint64_t>(int_of(c, "seed", 1));
        c.workers = static_cast<int>(int_of(c, "workers", 1));
        if (seed_opt->count()) c.seed = seed;
        if (workers_opt->count()) c.workers = workers;
        if (c.workers < 1) throw ConfigError("workers must be >= 1");
        c.out = out;
        std::filesystem::create_directories(c.out);
        for (const auto& [sub, fn] : subs)
            if (sub->parsed()) return fn(c);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "invariant failure: " << e.what() << '\n';
        return kInvariantFailure;
    }
    return kConfigError;
}
