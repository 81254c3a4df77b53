#pragma once

// Command-line front end: JSON run configs, the verify/solve/linear/list
// commands, and report writers.

#include "beamide/kernels.hpp"
#include "beamide/linsolve.hpp"
#include "beamide/monotone.hpp"
#include "beamide/problems.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace beamide::cli {

/// Exit statuses: success, a mathematical failure (verification,
/// convergence, contraction), a usage or configuration error.
enum ExitCode : int { exit_ok = 0, exit_math = 1, exit_usage = 2 };

/// Command-line values that take precedence over the config file.
struct Overrides {
    std::optional<int> n_panels;
    std::optional<double> tol;
    std::optional<int> max_iter;
    bool force = false;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;  ///< csv, json or both
    std::optional<std::uint64_t> seed;
    bool timings = false;
    int verbosity = 0;
};

struct OutputOptions {
    std::filesystem::path dir = "output";
    bool csv = true;
    bool json = true;
};

struct RunConfig {
    ProblemSpec spec;
    std::size_t samples = 10000;
    std::uint64_t seed = 42;
    OutputOptions output;
    bool force = false;
    bool timings = false;
    int verbosity = 0;
};

struct LinearConfig {
    std::string name = "linear";
    double M = 1.0;
    double N = 0.0;
    KernelSpec k;
    Expression p;
    BoundaryData bd;
    std::optional<Expression> exact;
    GreenFormula formula = GreenFormula::plus_m;
    int n_panels = 200;
    double tol = 1e-10;
    int max_iter = 0;
    OutputOptions output;
    bool timings = false;
    int verbosity = 0;
};

/// Both throw ConfigError (or ParseError) on malformed input.
RunConfig parse_run_config(const nlohmann::json& doc, const Overrides& o = {});
LinearConfig parse_linear_config(const nlohmann::json& doc, const Overrides& o = {});
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Writes via a temporary file in the same directory and a rename,
/// creating missing parent directories.
void write_atomically(const std::filesystem::path& path, const std::string& content);

/// %.17g.
std::string format_number(double v);

int cmd_verify(const std::filesystem::path& config, const Overrides& o, std::ostream& out, std::ostream& err);
int cmd_solve(const std::filesystem::path& config, const Overrides& o, std::ostream& out, std::ostream& err);
int cmd_linear(const std::filesystem::path& config, const Overrides& o, std::ostream& out, std::ostream& err);
int cmd_list(std::ostream& out);

/// Parses arguments and dispatches; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace beamide::cli
