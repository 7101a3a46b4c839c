#pragma once

#include <string>
#include <vector>

namespace pdm::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,     // structural or runtime failure
    kValidation = 2,  // validation violations in the input datasets
    kFoldOrFit = 3,   // fold construction or model fitting failed
};

/// Runs the `pdm` command line. args[0] is the program name.
int run(const std::vector<std::string>& args);

}  // namespace pdm::cli
