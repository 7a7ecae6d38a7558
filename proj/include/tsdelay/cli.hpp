#pragma once

#include <string>
#include <vector>

namespace tsdelay {

/// Runs one CLI invocation; args exclude the program name. Returns the process
/// exit code: 0 ok, 1 config/validation problem, 2 solver failure, 3 failed
/// verification. Tables go to stdout (or the -o file), errors to stderr.
int run_command(const std::vector<std::string>& args);

} // namespace tsdelay
