#pragma once

#include <string>
#include <vector>

namespace pellsmooth {

// Entry point shared by the binary and the tests. Exit codes: 0 success,
// 1 mathematical-consistency abort, 2 usage error.
int dispatch(const std::vector<std::string>& args);

}  // namespace pellsmooth
