#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace eksaii::cli {

enum ExitCode : int { kSuccess = 0, kUserError = 1, kInternalError = 2 };

// Runs one command line. `args` excludes the program name. Results go to
// `out`; failures are reported on `err` as a single JSON object
// {"error": <name>, "message": ..., ["line", "column"]}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eksaii::cli
