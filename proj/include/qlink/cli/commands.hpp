#pragma once

#include <iosfwd>

namespace qlink::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int { kOk = 0, kUsage = 2, kSolver = 3, kInternal = 1 };

/// Parses the command line, runs one subcommand and writes its outputs.
/// Progress goes to `out`, diagnostics to `err`; nothing is thrown.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qlink::cli
