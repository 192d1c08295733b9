#pragma once

#include <ostream>

namespace g2lab::cli {

/// Parses argv, runs one subcommand and returns the process exit code:
/// 0 success, 1 invalid input or configuration, 2 numerical failure.
/// Results go to `out` as JSON; failures add one error JSON line to `err`.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace g2lab::cli
