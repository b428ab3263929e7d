#pragma once

#include <iosfwd>

namespace banditlab::cli {

// Parses argv and dispatches the subcommand (run / oracle / plot).
// Returns the process exit code: 0 on success, nonzero with a diagnostic on
// err otherwise. Streams injected so tests can capture output.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace banditlab::cli
