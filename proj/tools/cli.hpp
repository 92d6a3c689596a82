#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ppp::cli {

enum ExitCode : int
{
  exit_ok = 0,
  exit_validation = 1,
  exit_runtime = 2,
  exit_budget = 3,
};

// Runs one subcommand. `args` excludes the program name, e.g.
// {"fit", "--data", "galaxy.csv", ...}.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

// `key=value` lines; blank lines and `#` comments are skipped.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

// Expands every `--config <path>` into `--key value` pairs for keys not
// already given as explicit flags. Explicit flags always win.
std::vector<std::string> merge_config(const std::vector<std::string>& args);

} // namespace ppp::cli
