#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qphase::cli {

enum ExitCode : int {
  kOk = 0,
  kDomainError = 1, // bad parameters, unknown flags
  kIoError = 2,
  kDivergence = 3,
};

/// Expands `--config <file>` (plain `key = value` lines, `#` comments) into
/// `--key=value` tokens placed directly after the subcommand, ahead of the
/// user's own flags, so that flags override the file and the file overrides
/// defaults. Unknown keys surface as unknown flags.
std::vector<std::string> layer_config(const std::vector<std::string>& args);

/// Entry point for `qphase <subcommand> ...`. Returns the process exit code.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int parse_and_dispatch(int argc, const char* const* argv);

} // namespace qphase::cli
