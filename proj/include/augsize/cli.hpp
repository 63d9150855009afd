#pragma once

#include <string>
#include <vector>

namespace augsize::cli {

// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
int run_command(const std::vector<std::string>& args);

}  // namespace augsize::cli
