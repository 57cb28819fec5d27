#pragma once

#include <iosfwd>

namespace sigraph::tools {

// Parses the command line and runs the selected subcommand. Returns the
// process exit code.
int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sigraph::tools
