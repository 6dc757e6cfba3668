#pragma once

#include <string>
#include <vector>

namespace navfuse {

/// Entry point of the command-line tool; returns the process exit code.
/// Exit codes: 0 success, 2 configuration error, 3 data error,
/// 4 numerical failure.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

}  // namespace navfuse
