#pragma once

#include <iosfwd>

namespace cyberirl {

/// Entry point of the `cyberirl` tool: subcommands simulate, irl-fit, eval, profile and report.
/// Returns the process exit code; diagnostics go to `err`, short summaries to `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cyberirl
