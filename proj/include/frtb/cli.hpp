#pragma once

#include <iosfwd>

namespace frtb::cli {

enum ExitCode : int {
    kOk = 0,
    kInputError = 1,
    kRulebookInvalid = 2,
};

/// Entry point shared by the executable and the tests. Reports go to `out` unless
/// --output names a file; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace frtb::cli
