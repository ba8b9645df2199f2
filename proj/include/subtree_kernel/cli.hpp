#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stk {

// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitParse = 2, kExitConfig = 3, kExitInternal = 4 };

// Runs one command line (args[0] is the program name) and returns its exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stk
