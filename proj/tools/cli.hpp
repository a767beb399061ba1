#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace pml::cli {

/// Exit codes of the dispatcher.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Reads a flat `key = value` file ('#' comments, blank lines ignored).
/// Throws std::runtime_error on malformed lines or an unreadable file.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Parses an angle in radians, or degrees with a `deg:` prefix.
double parse_angle(const std::string& text);

/// Parses a comma separated list of numbers.
std::vector<double> parse_list(const std::string& text);

/**
 * Runs one command line (args excludes the program name). Output tables go to `out`
 * (or the --output file), diagnostics to `err`. Returns 0 on success, 1 when a verdict
 * fails, 2 on usage errors.
 */
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pml::cli
