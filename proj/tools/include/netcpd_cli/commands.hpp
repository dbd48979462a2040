#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace netcpd::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitInput = 2,
    kExitNumerical = 3,
};

/// Full command-line entry point; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace netcpd::cli
