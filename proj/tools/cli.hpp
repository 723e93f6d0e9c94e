#pragma once

namespace cascade {

// Entry point of the `cascade` command-line tool. Returns 0 on success, 1 on
// a usage error (bad flags, unknown subcommand), 2 on a data or config error.
int cli_main(int argc, const char* const* argv);

}  // namespace cascade
