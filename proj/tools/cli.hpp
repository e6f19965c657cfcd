#ifndef BULKRES_TOOLS_CLI_HPP
#define BULKRES_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace bulkres::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariant = 1;
inline constexpr int kExitUsage = 2;

// Runs one command line (without the program name). Normal output goes to
// `out`, diagnostics to `err`; the return value is the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bulkres::cli

#endif  // BULKRES_TOOLS_CLI_HPP
