#pragma once

#include <cstdint>
#include <iosfwd>

namespace qwal {

inline constexpr std::uint64_t kDefaultSeed = 1;

/// Runs the `qwal` command line. Exit codes: 0 success, 1 parse or usage error, 2 semantic
/// error (caps, ambiguity, precondition), 3 internal error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qwal
