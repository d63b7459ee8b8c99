#pragma once

#include <string>
#include <vector>

namespace dcepcc::cli {

// Entry point behind the dcepcc binary. Exit codes: 0 success, 1 usage
// error, 2 data error, 3 check failure.
int run(int argc, const char* const* argv);

// Same, for in-process invocation; args exclude the program name.
int run(const std::vector<std::string>& args);

}  // namespace dcepcc::cli
