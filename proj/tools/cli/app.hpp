#pragma once

#include <ostream>

namespace obdeg::cli {

// Entry point behind main(); returns the process exit status
// (0 all checks pass, 1 a check failed, 2 configuration error, 3 runtime error).
int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace obdeg::cli
