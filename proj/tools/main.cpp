#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "l2morse/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "l2morse: piecewise traces, heat calculus, and Morse inequality "
        "verification on periodic cell complexes"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    const char* names[] = {"oracle-betti", "heat-trace", "morse-verify",
                           "trace-props", "decay-fit"};
    const char* descs[] = {
        "estimate per-degree values by the phase-fiber or finite-cover oracle",
        "emit per-tile heat traces of the (deformed) Laplacians",
        "evaluate the inequality ledger and the top-degree equality",
        "measure trace commutator defects against the certified decay bound",
        "classify the kernel decay of the heat operator"};
    std::string chosen;
    for (int i = 0; i < 5; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], descs[i]);
        sub->add_option("--config", config_path, "experiment config file")
            ->required();
        sub->add_option("--out", out_dir, "output directory for CSV files");
        std::string name = names[i];
        sub->callback([&chosen, name] { chosen = name; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        l2morse::ExperimentConfig cfg = l2morse::load_config(config_path);
        return l2morse::run_experiment(cfg, chosen, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
