#pragma once

#include <iosfwd>

namespace aprand::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2, kCheckFailed = 3 };

/// Entry point shared by main(); writes results to `out` and diagnostics to `err`.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace aprand::cli
