#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rankone::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kPass = 0,
    kUsage = 2,
    kCertificateFail = 3,
    kHorizon = 4,
};

/// Runs the tool with argv-style arguments (args[0] is the program name).
/// Diagnostics go to `err`, summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rankone::cli
