#pragma once

namespace nlt {

// Full command-line entry point (subcommands simulate, compare, certify,
// sweep, preset-list); exposed for in-process testing.
int cli_main(int argc, char const* const* argv);

}  // namespace nlt
