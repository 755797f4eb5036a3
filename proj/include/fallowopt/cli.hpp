#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fallowopt/ars.hpp"
#include "fallowopt/economics.hpp"
#include "fallowopt/model.hpp"
#include "fallowopt/params.hpp"

namespace fallowopt::cli {

/// Exit statuses of the command-line front end.
enum ExitCode : int {
    kOk = 0,
    kUsage = 2,  ///< parse error or invalid input
    kInfeasible = 3,
    kNumerical = 4,
};

/// Settings shared by every subcommand, filled from defaults, then the
/// config file, then command-line flags.
struct RunConfig {
    ModelParams params;
    double t_max = 4000.0;
    RegularizationSpec reg;
    ArsConfig ars;
    SolverConfig solver;
    double grid_step = 1.0;
    std::vector<double> taus;    ///< schedule for `simulate`
    std::vector<double> p_grid;  ///< initial infestations for `check-monotonicity`
    std::vector<double> two_season_taus;
    double sample_step = 1.0;
    std::filesystem::path out_dir = ".";
};

/// Applies the `key = value` lines of `text` to `cfg`. Blank lines and
/// '#' comments are ignored. Throws InvalidInput on unknown keys or
/// malformed values, naming the line.
void apply_config_text(const std::string& text, RunConfig& cfg);

/// Comma-separated list of finite numbers.
std::vector<double> parse_list(const std::string& text);

/// Runs one subcommand. Never throws; failures map to ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fallowopt::cli
