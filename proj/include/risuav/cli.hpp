#pragma once

// risuav run | sweep | oracle-check

#include <iosfwd>
#include <string>
#include <vector>

namespace risuav {

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_config = 2, exit_infeasible = 3 };

/// Parses `args` (without the program name), runs the command and returns the exit code.
/// CSV goes to `out` unless --out names a file; diagnostics and the run log go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Writes `content` to `path` through a sibling temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace risuav
