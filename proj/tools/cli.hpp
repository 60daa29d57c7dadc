#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rmspt::cli {

/// Runs one command line (args[0] is the program name). Returns the exit
/// code: 0 on success, 1 on a runtime failure, 2 on a usage or config error,
/// 3 when a check command ran but its tolerance was not met.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace rmspt::cli
