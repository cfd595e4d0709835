#pragma once

// Command-line frontend. Subcommands: `lexicon expand`, `score`, `train`,
// `classify`, `evaluate`, `patterns`, `stats`.

#include <iosfwd>
#include <string>
#include <vector>

namespace depscan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// `args` excludes the program name. Primary outputs go to the `-o` path
// (written atomically) or to `out` when no path is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Writes `content` to a temporary file beside `path`, then renames it over
// `path`.
void write_atomically(const std::string& path, const std::string& content);

}  // namespace depscan::cli
