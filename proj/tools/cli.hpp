#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cellres::cli {

/// Parses `args` (without the program name), runs the subcommand and returns the
/// process exit status: 0 on success, 1 on a library error, 2 on a usage error.
/// CSV goes to --output or to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cellres::cli

namespace cellres::cli {

struct ConfigEntry {
  std::string key;  // as written, e.g. "delta_step"
  std::string value;
  int line = 0;
};

/// Reads `key = value` lines; blank lines and lines starting with '#' are skipped.
/// Throws ConfigError carrying the line number on malformed lines.
std::vector<ConfigEntry> load_config_file(const std::string& path);

}  // namespace cellres::cli
