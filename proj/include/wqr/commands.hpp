#pragma once

#include "wqr/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace wqr {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitInfeasible = 3,
  kExitInconclusive = 4,
};

struct CommandOptions {
  /// build, energy, degree, dimension, blowup, slice or report.
  std::string verb;
  std::optional<std::string> config_path;
  std::optional<std::string> tree_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
};

/// Runs one verb, writing artifacts under the output directory and a short
/// human summary to `log`. Library errors become an error record (JSON on
/// `err` and error.json in the output directory) and a nonzero exit code.
int run_command(const CommandOptions& opts, std::ostream& log, std::ostream& err);

/// Exit code for a library error kind.
int exit_code_for(const std::string& kind);

}  // namespace wqr
