#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace circlecomm::cli {

enum ExitCode : int { ok = 0, usage = 1, input = 2, runtime = 3 };

/// Runs `circlecomm <subcommand> ...`. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Each `key = value` line of a flat config file, as a `--key=value` token.
/// Blank lines and lines starting with '#' or ';' are skipped.
std::vector<std::string> config_tokens(std::istream& in);

}  // namespace circlecomm::cli
