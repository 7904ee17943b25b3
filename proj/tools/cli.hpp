#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace jcs::cli {

enum ExitCode : int { kOk = 0, kResidualFailure = 1, kParseError = 2 };

/// Runs one subcommand. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jcs::cli
