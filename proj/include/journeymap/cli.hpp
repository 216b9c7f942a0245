#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace journey::cli {

enum ExitCode : int {
    kSuccess = 0,
    kFailure = 1,
    kEmptyResult = 2,
};

/// Runs one command line (args[0] is the program name). Text goes to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Asks a running `serve` command to stop; also triggered by SIGINT/SIGTERM.
void request_shutdown();

}  // namespace journey::cli
