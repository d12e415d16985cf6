#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace celdyn::cli {

/// Exit-code contract of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kValidationError = 2,
  kNumericalError = 3,
};

/// Environment variable naming the directory for relative output paths.
inline constexpr const char* kOutputDirEnv = "CELDYN_OUTPUT_DIR";

/// Runs the tool with `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace celdyn::cli
