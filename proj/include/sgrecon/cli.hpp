#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace sgrecon::cli {

/// Runs the command-line front end on the given argument list (without the
/// program name). Returns the process exit code: 0 success, 1 usage error,
/// 2 data/runtime error, 3 solver did not converge.
int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
        std::ostream& err = std::cerr);

}  // namespace sgrecon::cli
