#pragma once

// Command-line front end. Exit codes: 0 success, 1 usage error, 2 data
// error, 3 backend error.

#include <ostream>

namespace novascore::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kBackendError = 3 };

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace novascore::cli
