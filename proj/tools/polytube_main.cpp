#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "polytube/common.hpp"
#include "scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"billiard tubes, orbit density and spectral verifiers"};
    app.require_subcommand(1);

    ptb::cli::RunOptions opts;
    if (const char* env = std::getenv("POLYTUBE_TOL"))
        opts.tol_override = std::atof(env);

    std::string scenario_path, polytope_path;
    auto* run = app.add_subcommand("run", "execute a scenario file");
    run->add_option("scenario", scenario_path, "scenario JSON file")
        ->required();
    run->add_option("--tol", opts.tol_override, "geometry tolerance override");
    run->add_option("--threads", opts.threads, "worker threads");
    run->add_option("--out-dir", opts.out_dir,
                    "directory overriding scenario output paths");

    auto* validate = app.add_subcommand("validate", "check a polytope file");
    validate->add_option("polytope", polytope_path, "polytope JSON file")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (run->parsed()) return ptb::cli::run_scenario_file(scenario_path, opts);
    double tol = opts.tol_override > 0 ? opts.tol_override : ptb::kDefaultTol;
    return ptb::cli::validate_polytope_file(polytope_path, tol);
}
