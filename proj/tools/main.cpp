#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adishort/report.hpp"
#include "adishort/scenario.hpp"

namespace {

using adishort::scenario::Config;

// Applies `--set section.key=value` pairs; flags win over the config file.
void apply_overrides(Config& cfg, const std::vector<std::string>& sets)
{
    for (const std::string& item : sets) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw adishort::scenario::ConfigError("--set expects section.key=value, got '" +
                                                  item + "'");
        }
        cfg.set(item.substr(0, eq), item.substr(eq + 1));
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Adiabatic drive synthesis from partial spectral information: "
                 "edge-state transfer and charge-pump simulations"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::vector<std::string> sets;
    long long seed = -1;
    int workers = -1;
    int steps = -1;

    app.add_option("--config", config_path, "INI-style configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "RNG seed recorded in every output header");
    app.add_option("--workers", workers, "worker threads for sweeps (0 = hardware)");
    app.add_option("--steps", steps, "integration steps per evolution");
    app.add_option("--set", sets, "override config entries, section.key=value")
        ->take_all();

    const std::vector<std::string> kinds = {"ssh-transfer", "pump", "schedule",
                                            "spectrum", "sweep"};
    for (const std::string& kind : kinds) {
        app.add_subcommand(kind);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        Config cfg;
        if (!config_path.empty()) {
            cfg = Config::from_file(config_path);
        }
        apply_overrides(cfg, sets);
        if (!out_dir.empty()) {
            cfg.set("output.dir", out_dir);
        }
        if (seed >= 0) {
            cfg.set("output.seed", std::to_string(seed));
        }
        if (workers >= 0) {
            cfg.set("output.workers", std::to_string(workers));
        }
        if (steps >= 0) {
            cfg.set("evolution.steps", std::to_string(steps));
        }
        for (const std::string& kind : kinds) {
            if (app.got_subcommand(kind)) {
                cfg.set("scenario.kind", kind);
            }
        }
        return adishort::scenario::run_scenario(cfg);
    } catch (const adishort::scenario::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return adishort::scenario::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return adishort::scenario::kExitNumerical;
    }
}
