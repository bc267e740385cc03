#pragma once

#include <string>
#include <vector>

namespace fieldvar::cli {

/// The command-line entry point behind the fieldvar binary. Returns the
/// process exit code: 0 on success, 1 for declared module errors, 2 for
/// flag errors.
int run(const std::vector<std::string>& args);

}  // namespace fieldvar::cli
