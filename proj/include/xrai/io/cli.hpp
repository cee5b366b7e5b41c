#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace xrai::io {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitRuntime = 2 };

/// Entry point of the `xrai` command-line tool. Progress goes to `err`,
/// command results (e.g. an interpreted function) to `out`, data to files.
int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace xrai::io
