#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "cgem/commands.hpp"

namespace {

struct RawArgs {
    std::string config_file;
    std::map<std::string, std::string> fields;  // flag overrides, by field name
};

/// Adds one flag per config field; values land in raw.fields so they can be
/// applied after the config file (flags take precedence).
void add_config_options(CLI::App* cmd, RawArgs& raw) {
    cmd->add_option("--config", raw.config_file, "JSON config file; any field may be set");
    cgem::cli::ExperimentConfig probe;
    for (const auto& field : cgem::cli::config_fields(probe)) {
        const std::string flag = "--" + field.name;
        const std::string name = field.name;
        cmd->add_option_function<std::string>(
            flag, [&raw, name](const std::string& v) { raw.fields[name] = v; },
            "override config field " + name);
    }
}

cgem::cli::ExperimentConfig resolve_config(const RawArgs& raw) {
    // system/preset decide the defaults, so resolve them first: flag, then
    // config file, then built-in default.
    std::string system = "l96";
    std::string preset = "paper";
    cgem::cli::ExperimentConfig probe;
    if (!raw.config_file.empty()) {
        cgem::cli::apply_config_file(probe, raw.config_file);
        system = probe.system;
        preset = probe.preset;
    }
    if (auto it = raw.fields.find("system"); it != raw.fields.end()) system = it->second;
    if (auto it = raw.fields.find("preset"); it != raw.fields.end()) preset = it->second;

    cgem::cli::ExperimentConfig cfg = cgem::cli::make_config(system, preset);
    if (!raw.config_file.empty()) cgem::cli::apply_config_file(cfg, raw.config_file);
    cfg.system = system;
    cfg.preset = preset;
    for (const auto& [name, value] : raw.fields) cgem::cli::set_field(cfg, name, value);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coarse-grained emulator pipeline for chaotic dynamical systems"};
    app.require_subcommand(1);

    RawArgs raw;
    std::string train_mode = "both";

    CLI::App* simulate = app.add_subcommand(
        "simulate", "Generate a trajectory and write paired train/val/holdout datasets");
    add_config_options(simulate, raw);

    CLI::App* train = app.add_subcommand(
        "train", "Run the seed sweep (two-phase transfer learning and/or baseline)");
    add_config_options(train, raw);
    train->add_option("--mode", train_mode, "tl | baseline | both")
        ->check(CLI::IsMember({"tl", "baseline", "both"}));

    CLI::App* evaluate =
        app.add_subcommand("evaluate", "Hold-out log-likelihood summary for both modes");
    add_config_options(evaluate, raw);

    CLI::App* forecast =
        app.add_subcommand("forecast", "Ensemble forecast error/spread curves per mode");
    add_config_options(forecast, raw);

    CLI::App* indicator =
        app.add_subcommand("indicator", "Transfer-benefit indicator for the configured model");
    add_config_options(indicator, raw);

    CLI11_PARSE(app, argc, argv);

    try {
        const cgem::cli::ExperimentConfig cfg = resolve_config(raw);
        if (simulate->parsed()) {
            cgem::cli::run_simulate(cfg);
        } else if (train->parsed()) {
            if (train_mode == "tl" || train_mode == "both")
                cgem::cli::run_train(cfg, cgem::train::TrainMode::tl);
            if (train_mode == "baseline" || train_mode == "both")
                cgem::cli::run_train(cfg, cgem::train::TrainMode::baseline);
        } else if (evaluate->parsed()) {
            cgem::cli::run_evaluate(cfg);
        } else if (forecast->parsed()) {
            cgem::cli::run_forecast(cfg);
        } else if (indicator->parsed()) {
            cgem::cli::run_indicator(cfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
