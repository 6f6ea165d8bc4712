#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace occorbit {

enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 2,
    kExitInfeasible = 3,
    kExitRuntime = 4,
};

// Runs the command-line front end; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace occorbit
