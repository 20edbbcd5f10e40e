#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wlab/experiments.hpp"

namespace {

struct CommonArgs {
    std::string config;
    std::string out;
    std::string grid;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "JSON experiment config");
    cmd->add_option("--out", args.out, "output directory");
    cmd->add_option("--grid", args.grid, "grid size as NxM (even, >= 8)");
    std::uint64_t* seed_slot = nullptr;
    (void)seed_slot;
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&args](std::uint64_t s) { args.seed = s; }, "RNG seed");
}

wlab::ExperimentConfig resolve(wlab::ExperimentKind kind, const CommonArgs& args) {
    wlab::ExperimentConfig config = args.config.empty()
                                        ? wlab::default_config(kind)
                                        : wlab::load_config(args.config, kind);
    if (!args.out.empty()) config.out_dir = args.out;
    if (args.seed) config.seed = *args.seed;
    if (!args.grid.empty()) {
        const auto x = args.grid.find('x');
        if (x == std::string::npos) {
            throw wlab::ConfigError("--grid: expected NxM, got '" + args.grid + "'");
        }
        config.n_theta = std::stoi(args.grid.substr(0, x));
        config.n_phi = std::stoi(args.grid.substr(x + 1));
    }
    wlab::validate_config(config);
    return config;
}

int run(wlab::ExperimentKind kind, const CommonArgs& args) {
    wlab::ExperimentConfig config;
    try {
        config = resolve(kind, args);
    } catch (const wlab::ConfigError& e) {
        nlohmann::json err = {{"error", "config"}, {"message", e.what()}};
        std::cerr << err.dump(2) << "\n";
        return 2;
    }

    try {
        const wlab::ExperimentResult result = wlab::run_experiment(config);
        if (!result.pass) {
            nlohmann::json err = {{"error", "thresholds"},
                                  {"experiment", wlab::experiment_name(kind)},
                                  {"failures", result.failures}};
            std::cerr << err.dump(2) << "\n";
            return 1;
        }
        std::cout << wlab::experiment_name(kind) << ": pass ("
                  << result.outputs.size() << " files in " << config.out_dir << ")\n";
        return 0;
    } catch (const wlab::LabError& e) {
        nlohmann::json err = {{"error", "runtime"}, {"message", e.what()}};
        std::cerr << err.dump(2) << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for conformally constrained tori in S^3"};
    app.require_subcommand(1);

    struct Entry {
        wlab::ExperimentKind kind;
        const char* description;
    };
    const std::vector<std::pair<std::string, Entry>> commands = {
        {"invariance",
         {wlab::ExperimentKind::Invariance,
          "Willmore and tracefree energies under conformal transforms"}},
        {"sweep",
         {wlab::ExperimentKind::CanonicalSweep,
          "canonical-family area table over (v, t) with argmax"}},
        {"boundary",
         {wlab::ExperimentKind::Boundary,
          "collapse behavior for |v| near 1, sphere fits and Hausdorff trends"}},
        {"stability",
         {wlab::ExperimentKind::StabilityScaling,
          "scaling of the stability norms along an epsilon family"}},
        {"identities",
         {wlab::ExperimentKind::Identities,
          "integral identity checks over the surface corpus"}},
    };

    std::vector<CommonArgs> args(commands.size());
    std::vector<wlab::ExperimentKind> kinds;
    int idx = 0;
    for (const auto& [name, entry] : commands) {
        CLI::App* cmd = app.add_subcommand(name, entry.description);
        add_common(cmd, args[idx]);
        kinds.push_back(entry.kind);
        ++idx;
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t k = 0; k < commands.size(); ++k) {
        if (app.get_subcommand(commands[k].first)->parsed()) {
            return run(kinds[k], args[k]);
        }
    }
    return 2;
}
