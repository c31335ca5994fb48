#pragma once

#include <ostream>

namespace sos::cli {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitDomain = 2;

// Parses argv, runs one subcommand and writes its JSON report to `out` (or
// to --output). Domain errors and malformed input print a JSON error object
// to `out` and return kExitDomain; anything else returns kExitInternal.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sos::cli
