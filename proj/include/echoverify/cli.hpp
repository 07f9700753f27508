#ifndef ECHOVERIFY_CLI_HPP
#define ECHOVERIFY_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace echoverify {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitViolation = 1,  // a check failed or the run target is unreachable
  kExitUsage = 2,      // bad flags, bounds or input files
  kExitResource = 3,   // state budget exhausted
};

/// Entry point of the `echoverify` command; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace echoverify

#endif  // ECHOVERIFY_CLI_HPP
