#pragma once

#include <ostream>

namespace structcov {

/// Exit codes: 0 ok, 1 runtime failure, 2 usage, 3 non-convergence,
/// 4 tolerance breach.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace structcov
