#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace og {

// Exit codes of the og command line.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitIo = 2,
    kExitEmpty = 3,  // no foreground / placement failure
};

// Runs `og <args...>` (args exclude the program name). Machine output that
// goes to standard output is written to out; diagnostics go to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace og
