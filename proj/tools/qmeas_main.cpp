#include "experiments.hpp"

#include "qmeas/version.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{
        "qmeas - generalized quantum measurement experiments\n"
        "Experiments: epr, martens, chsh, subquantum, collective"};
    app.set_version_flag("--version", qmeas::kVersion);
    app.require_subcommand(1);

    qmeas::cli::Invocation inv;
    std::string config_path, output_path, model, angles;
    std::uint64_t seed = 0, samples = 0;

    for (const std::string name : {"epr", "martens", "chsh", "subquantum", "collective"}) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", config_path, "experiment config JSON");
        sub->add_option("--seed", seed, "root seed (overrides config)");
        sub->add_option("--samples", samples, "sample count (overrides config)");
        sub->add_option("--out", output_path, "report path (overrides config)");
        if (name == "subquantum") {
            sub->add_option("--model", model,
                            "noncontextual_sphere | contextual_reference");
            sub->add_option("--angles", angles, "a1,b1,a2,b2 in radians");
        }
        sub->callback([&inv, name, sub, &config_path, &output_path, &model, &angles, &seed,
                       &samples] {
            inv.experiment = name;
            if (sub->count("--config")) inv.config_path = config_path;
            if (sub->count("--seed")) inv.seed = seed;
            if (sub->count("--samples")) inv.samples = samples;
            if (sub->count("--out")) inv.output_path = output_path;
            if (name == "subquantum") {
                if (sub->count("--model")) inv.model = model;
                if (sub->count("--angles")) inv.angles = angles;
            }
        });
    }

    CLI11_PARSE(app, argc, argv);
    return qmeas::cli::run(inv);
}
