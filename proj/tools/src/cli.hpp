#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace powl2::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kUsageError = 2,
  kInconclusive = 3,
  kInternalError = 4,
};

// Runs one command line. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace powl2::cli
