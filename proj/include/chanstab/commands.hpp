#pragma once

// Subcommands of the `chanstab` executable. Each reads one TOML config, writes
// CSV files plus manifest.json into the output directory, and returns an exit
// code: 0 ok, 2 config error, 3 numerical failure, 4 bisection bracket error.

#include <cstdint>
#include <optional>
#include <string>

namespace chanstab {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitBracket = 4,
};

struct CommandOptions {
  std::string command;  // resolvent | psi | semigroup | simulate | threshold | bootstrap
  std::string config_path;
  std::string out_dir = "out";
  int jobs = 0;  // 0: all cores
  std::optional<std::uint64_t> seed;
};

int run_command(const CommandOptions& options);

/// Argument parsing plus run_command.
int cli_main(int argc, char** argv);

/// Git blob hash ("blob <size>\0" + content) as 40 hex digits.
std::string git_blob_sha1(const std::string& content);

}  // namespace chanstab
