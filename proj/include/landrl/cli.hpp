#pragma once

#include <string>
#include <vector>

namespace landrl::cli {

// Entry point behind the landrl binary. args excludes argv[0].
// Exit codes: 0 success, 1 runtime error, 2 usage or configuration error.
int run(const std::vector<std::string>& args);

}  // namespace landrl::cli
