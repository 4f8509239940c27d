#ifndef POLYTUBE_TOOLS_SCENARIO_HPP
#define POLYTUBE_TOOLS_SCENARIO_HPP

#include <string>

namespace ptb::cli {

// exit codes: 0 ok, 2 parse error, 3 missing input, 4 an in-scenario check failed
struct RunOptions {
    double tol_override = -1.0;   // <= 0: keep scenario / default
    int threads = 1;
    std::string out_dir;          // empty: use scenario paths as-is
};

int run_scenario_file(const std::string& path, const RunOptions& opts);
int validate_polytope_file(const std::string& path, double tol);

}  // namespace ptb::cli

#endif
