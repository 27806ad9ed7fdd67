#pragma once

#include <string>
#include <vector>

namespace lexf {

/// Entry point shared by the binary and the in-process CLI tests.
/// Exit codes: 0 success, 2 validation error, 3 infeasible (guards or not
/// enough information), 4 internal numeric failure.
int cli_main(const std::vector<std::string>& args);

}  // namespace lexf
