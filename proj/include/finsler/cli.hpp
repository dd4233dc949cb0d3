#pragma once

#include <string>
#include <vector>

namespace finsler::cli {

/// Runs the command-line front end on argv (program name excluded).
/// Exit codes: 0 all dispatched checks pass, 1 check failure, 2 usage or
/// configuration error (no output file is written in that case).
int run(const std::vector<std::string>& args);

}  // namespace finsler::cli
