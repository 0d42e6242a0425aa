#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hcl {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitError = 2,
};

/// Entry point of `hcl`. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hcl
