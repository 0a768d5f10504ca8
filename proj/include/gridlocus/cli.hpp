#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gridlocus {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitInfeasible = 1,
  kExitInputError = 2,
  kExitInternalFailure = 3,
};

/// Runs one gridlocus command. `args` excludes the program name. Payloads go
/// to `out`, progress and error messages to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "a1,a2,..." into numbers. Throws Error(InvalidArgument).
std::vector<double> parse_alpha_list(const std::string& text);

}  // namespace gridlocus
