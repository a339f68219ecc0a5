// Command-line front door: one verification subcommand per invocation, or a
// batch over a manifest of configs.
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lorentz/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"desk-scale laboratory for discrete causal geometry and transport"};
    app.require_subcommand(0, 1);

    std::string config_path, out_dir, manifest_path;
    std::uint64_t seed = 0;
    bool quiet = false;
    double tol = 0.0;

    app.add_option("--config", config_path, "configuration file");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed override");
    auto* tol_opt = app.add_option("--tol", tol, "global tolerance override");
    app.add_option("--out", out_dir, "output directory override");
    app.add_flag("--quiet", quiet, "suppress the summary on stdout");

    const std::vector<std::string> commands{
        "validate", "lq",     "interpolate", "lift",      "duality",  "good-geodesic",
        "tmcp-check", "curve-speed", "slopes", "mcshane", "null-dist", "dalembert",
        "brenier",  "norms"};
    for (const std::string& c : commands) app.add_subcommand(c, "")->fallthrough();
    auto* batch_cmd = app.add_subcommand("batch", "run a manifest of configs");
    batch_cmd->fallthrough();
    batch_cmd->add_option("manifest", manifest_path, "manifest file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (batch_cmd->parsed())
            return lorentz::cli::batch(manifest_path, out_dir.empty() ? "." : out_dir, quiet);

        lorentz::cli::RunConfig cfg;
        if (!config_path.empty()) cfg = lorentz::cli::parse_config_file(config_path);
        for (const auto* sub : app.get_subcommands())
            if (sub->get_name() != "batch") cfg.command = sub->get_name();
        if (cfg.command.empty()) {
            std::cerr << "error: no subcommand given (and none in the config)\n";
            return 2;
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed_opt->count() > 0) cfg.seed = seed;
        if (tol_opt->count() > 0) cfg.tol = tol;
        cfg.quiet = quiet;
        return lorentz::cli::run(cfg);
    } catch (const lorentz::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case lorentz::ErrorKind::Parse: return 2;
            case lorentz::ErrorKind::Numerical: return 4;
            default: return 3;
        }
    }
}
