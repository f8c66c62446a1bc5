#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace amoc::cli {

/// Process exit codes of the `amoc` tool.
enum ExitCode : int {
    kRetain = 0,
    kReject = 1,
    kUsage = 2,
    kData = 3,
    kNumerical = 4,
};

/// Runs the command line `args` (without the program name). Reports go to
/// `out` unless redirected to files; diagnostics and config echoes to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace amoc::cli
