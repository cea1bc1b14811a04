#pragma once

#include <string>
#include <vector>

namespace dunedetect {

/// Entry point shared by the binary and the tests. Exit codes: 0 success,
/// 2 input/config error, 1 runtime failure.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace dunedetect
