#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ouat {

/// Exit codes of the command line tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,    // selftest failures, internal errors
    exit_validation = 2, // malformed config, flags or input files
    exit_hypothesis = 3, // a theorem hypothesis does not hold for the inputs
};

/// Runs one subcommand (norm | conjugate | construct | fit | robust |
/// selftest). `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ouat
