#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace claimguard::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kInvalidInput = 2,  // malformed corpus, invalid configuration or arguments
    kIoError = 3,
    kNoProviders = 4,
};

/// Runs one command line (without the program name). Artifacts go to files,
/// results to `out`, diagnostics to `err`; logging goes to stderr.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace claimguard::cli
