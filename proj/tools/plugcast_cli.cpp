// plugcast command-line front end. Talks to the library only through the C API.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "plugcast/plugcast.h"

namespace {

int exit_code(plugcast_status status) {
    switch (status) {
        case PLUGCAST_OK: return 0;
        case PLUGCAST_E_VALIDATION:
        case PLUGCAST_E_INVALID_ARGUMENT: return 1;
        case PLUGCAST_E_DATA:
        case PLUGCAST_E_INTERNAL: return 2;
        case PLUGCAST_E_TRAINING: return 3;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Day-ahead forecasting of half-hourly minimum aggregate EV plug-in"};
    app.set_version_flag("--version", std::string(plugcast_version()));
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> epochs;
    bool plot = false;
    bool floor_predictions = false;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory (overrides paths.output_dir)");
    app.add_option("--seed", seed, "Master seed; derives every synth, split and training seed");
    app.add_option("--epochs", epochs, "Override train.epochs")->check(CLI::NonNegativeNumber);
    app.add_flag("--plot", plot, "Also write box-plot summary files for external plotting");
    app.add_flag("--floor", floor_predictions, "Round forecasts down to whole vehicles before scoring");

    const char* commands[][2] = {
        {"synth", "Generate a synthetic charging-event CSV"},
        {"build", "Ingest events and build the half-hourly minimum series"},
        {"analyze", "Grouped distributions, day-before correlations, ADF and exogenous correlation"},
        {"train", "Build features, split, fit the GLM and train the networks"},
        {"evaluate", "Score every model and write the evaluation report"},
        {"report", "analyze followed by evaluate"},
    };
    for (const auto& c : commands) app.add_subcommand(c[0], c[1]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    std::string config_text = "{}";
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        config_text = buf.str();
    }
    nlohmann::json overrides = nlohmann::json::object();
    if (!out_dir.empty()) overrides["out"] = out_dir;
    if (seed) overrides["seed"] = *seed;
    if (epochs) overrides["epochs"] = *epochs;
    if (plot) overrides["plot"] = true;
    if (floor_predictions) overrides["floor"] = true;

    const std::string command = app.get_subcommands().front()->get_name();
    const plugcast_status status = plugcast_run(command.c_str(), config_text.c_str(), overrides.dump().c_str());
    if (status != PLUGCAST_OK) {
        std::cerr << "plugcast " << command << ": " << plugcast_last_error() << '\n';
    }
    return exit_code(status);
}
