#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace startetrad::cli {

// Runs the command line `args` (program name excluded). Returns the process
// exit code: 0 consistent / all proper, 1 inconsistent, heywood or improper
// loadings, 2 bad input or usage.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace startetrad::cli
