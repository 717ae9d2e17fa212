#pragma once

#include <ostream>

namespace hahn {

/// Entry point of hahn-forge. JSON goes to `out`, a one-line summary to `err`.
/// Exit codes: 0 success, 1 verification failure, 2 usage, parse or domain
/// error, 3 precision or budget error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hahn
