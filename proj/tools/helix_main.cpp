#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "helix/config.hpp"
#include "helix/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"helixlab: co-rotating helical filament and clustered vortex laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;

    const std::vector<std::string> commands = {"equilibria", "simulate", "landscape",
                                               "green",      "solve",    "energy"};
    const std::vector<std::string> blurbs = {
        "build and verify the exact co-rotating configurations",
        "integrate the filament interaction system",
        "locate critical points of the reduced energy landscapes",
        "Green's function, Robin value and corrector probes",
        "solve the clustered semilinear problem and report components",
        "compare the ansatz energy against the finite-dimensional expansion"};
    for (size_t k = 0; k < commands.size(); ++k) {
        CLI::App* sub = app.add_subcommand(commands[k], blurbs[k]);
        sub->add_option("--config", config_path, "JSON configuration file");
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--override", overrides, "key=value override, repeatable");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        helix::RunConfig cfg = config_path.empty()
                                   ? helix::parse_config_text("{}", command)
                                   : helix::parse_config_file(config_path, command);
        for (const std::string& ov : overrides) helix::apply_override(cfg, ov);
        if (!out_dir.empty()) cfg.doc["output"]["dir"] = out_dir;
        // Re-validate after overrides.
        cfg = helix::parse_config_text(cfg.doc.dump(2), command);
        if (!out_dir.empty()) cfg.doc["output"]["dir"] = out_dir;
        return helix::run_command(command, cfg);
    } catch (const helix::ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
