// Command-line front end: subcommands over the built-in domain registry,
// configured by a key = value file with flag overrides.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "reflectics/run_config.hpp"
#include "reflectics/runner.hpp"

namespace {

struct Flags {
    std::string config_path;
    std::string seed;
    std::string out;
    int workers = 0;
    std::string format;
    bool override_integrability = false;
};

void add_common(CLI::App* cmd, Flags& flags, bool planet) {
    cmd->add_option("--config", flags.config_path, "key = value configuration file");
    cmd->add_option("--seed", flags.seed, "64-bit RNG seed (required here or in the config)");
    cmd->add_option("--out", flags.out, "output directory");
    cmd->add_option("--workers", flags.workers, "worker thread count (wall time only)");
    cmd->add_option("--format", flags.format, "artifact format: csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    if (planet)
        cmd->add_flag("--override-integrability", flags.override_integrability,
                      "sample even when the finiteness check is inconclusive");
}

int dispatch(const std::string& subcommand, const std::string& planet_mode, const Flags& flags) {
    reflectics::RunConfig config;
    try {
        if (!flags.config_path.empty())
            config = reflectics::parse_config_file(flags.config_path);
        config.subcommand = subcommand;
        if (!planet_mode.empty()) config.planet_mode = planet_mode;
        if (!flags.seed.empty()) {
            size_t pos = 0;
            config.seed = std::stoull(flags.seed, &pos);
            if (pos != flags.seed.size())
                throw reflectics::ConfigError("--seed: expected an unsigned 64-bit integer");
            config.seed_set = true;
        }
        if (!flags.out.empty()) config.out_dir = flags.out;
        if (flags.workers > 0) config.workers = flags.workers;
        if (!flags.format.empty()) config.format = flags.format;
        if (flags.override_integrability) config.override_integrability = true;
        config.validate();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return reflectics::kExitParseError;
    }
    return reflectics::run(config);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"reflectics: reflected diffusions on constraint domains"};
    app.require_subcommand(1);

    Flags flags;
    auto* check = app.add_subcommand("check-compat", "certify the constraint-compatibility condition");
    add_common(check, flags, false);
    auto* sim = app.add_subcommand("simulate", "integrate the reflected SDE");
    add_common(sim, flags, false);
    auto* gibbs = app.add_subcommand("sample-gibbs", "sample 1_D e^{-phi}");
    add_common(gibbs, flags, true);
    auto* rev = app.add_subcommand("reversibility", "swap-symmetry test from equilibrium starts");
    add_common(rev, flags, false);

    auto* planet = app.add_subcommand("planet", "planet-and-particles model");
    planet->require_subcommand(1);
    std::string planet_mode;
    for (const char* mode : {"simulate", "clustering-curve", "check-model"}) {
        auto* sub = planet->add_subcommand(mode);
        add_common(sub, flags, true);
        sub->callback([&planet_mode, mode] { planet_mode = mode; });
    }

    CLI11_PARSE(app, argc, argv);

    if (check->parsed()) return dispatch("check-compat", "", flags);
    if (sim->parsed()) return dispatch("simulate", "", flags);
    if (gibbs->parsed()) return dispatch("sample-gibbs", "", flags);
    if (rev->parsed()) return dispatch("reversibility", "", flags);
    return dispatch("planet", planet_mode, flags);
}
