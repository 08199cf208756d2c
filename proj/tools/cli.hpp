#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bssplan::cli {

/// Runs the command line `args` (without the program name). Returns the exit
/// code: 0 success, 1 solver failure, 2 input error, 3 configuration error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace bssplan::cli
