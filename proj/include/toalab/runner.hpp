#pragma once
// Batch driver behind the command line: subcommands, pinned reproduction targets, output files.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "toalab/config.hpp"

namespace toalab {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { exit_ok = 0, exit_io = 1, exit_config = 2, exit_numerical = 3 };

struct RunOptions {
    std::string subcommand;
    std::string target;  // reproduce only
    std::optional<std::string> config_path;
    std::string out_dir = "toalab-out";
    std::optional<int> threads;
    std::optional<double> tolerance;
};

const std::vector<std::string>& subcommands();
const std::vector<std::string>& reproduce_targets();

// Config used by `reproduce <target>`; throws ConfigError for unknown targets.
RunConfig pinned_config(const std::string& target);

// Never throws. Failures produce error.json in the output directory and a
// one-line JSON record on `err`.
int run(const RunOptions& opt, std::ostream& log, std::ostream& err);

// 17 significant digits, as written to every CSV file
std::string format_number(double x);

}  // namespace toalab
