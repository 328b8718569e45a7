#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace salttrack::cli {

/// Runs one `salttrack` invocation; args[0] is the program name. Returns the
/// process exit code (0 ok, 1 usage, 2 data, 3 numerical).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace salttrack::cli
