#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace movnet {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitAssumption = 2,
    kExitNoConsensus = 3,
};

/// Entry point of the `movnet` tool; `args` excludes the program name.
/// Subcommands: analyze-graph, simulate, monte-carlo, ergodic.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace movnet
