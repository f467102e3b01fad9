#pragma once

#include <string>
#include <vector>

namespace fepool {

/// Entry point behind the `fepool` binary. Returns the process exit code:
/// 0 success, 2 configuration error, 3 data error, 4 numerical failure.
int run_cli(const std::vector<std::string>& args);

} // namespace fepool
