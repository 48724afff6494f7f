#pragma once

#include <iosfwd>

namespace graphblow {

/// Entry point of the `graphblow` tool. Exit codes: 0 success, 1 solver
/// failure, 2 invalid input (one-line diagnostic on `err`), 3 I/O failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace graphblow
