// adlab.cpp - command-line front end: `adlab run` and `adlab validate`

#include "adlab/config.hpp"
#include "adlab/errors.hpp"
#include "adlab/matrix_file.hpp"
#include "adlab/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kConfigError = 2;
constexpr int kTaskFailure = 3;

// Loads the config and, for file-backed models, the samples it points to.
adlab::ExperimentConfig load_checked(const std::string& path) {
    auto cfg = adlab::load_config(path);
    if (cfg.model.type == "matrix_file") {
        const auto model = adlab::build_model(cfg.model);
        if (cfg.level >= model.dimension()) {
            throw adlab::ConfigInvalid("level", "must be < " + std::to_string(model.dimension()));
        }
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adlab - adiabatic evolution, geometric phase and adiabaticity diagnostics"};
    app.require_subcommand(1);

    std::string config_path, out_dir, format;
    auto* run = app.add_subcommand("run", "execute the tasks of a configuration");
    run->add_option("--config", config_path, "experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory (overrides output.directory)");
    run->add_option("--format", format, "output format (overrides output.format)")
        ->check(CLI::IsMember({"csv", "json"}));

    auto* validate = app.add_subcommand("validate", "check a configuration without running it");
    validate->add_option("--config", config_path, "experiment configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        auto cfg = load_checked(config_path);
        if (*validate) {
            std::cout << "ok: " << cfg.model.type << ", " << cfg.grid.steps << " steps, " << cfg.tasks.size()
                      << " task(s)\n";
            return 0;
        }
        if (!out_dir.empty()) cfg.output.directory = out_dir;
        if (!format.empty()) cfg.output.format = format;
        const auto manifest = adlab::run(cfg);
        std::cout << "wrote " << (manifest.directory / "manifest.json").string() << '\n';
        return 0;
    } catch (const adlab::ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const adlab::ParseError& e) {
        std::cerr << "config error: matrix file " << e.what() << '\n';
        return kConfigError;
    } catch (const adlab::NotHermitian& e) {
        std::cerr << "config error: matrix file " << e.what() << '\n';
        return kConfigError;
    } catch (const adlab::TaskFailed& e) {
        std::cerr << "task failure: " << e.what() << '\n';
        return kTaskFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kTaskFailure;
    }
}
