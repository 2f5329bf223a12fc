#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace wgs {

/// Exit statuses of the command-line driver.
enum ExitCode : int { kExitOk = 0, kExitInvalid = 1, kExitSolver = 2 };

/// Parses `key = value` lines (`#` starts a comment). Throws
/// std::invalid_argument on a malformed line or unreadable file.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

/// Entry point of the `wgstokes` tool: subcommands solve-eig, solve-source,
/// study, glb-check and mesh-info.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wgs
