#pragma once

// The `fcm` command-line driver, callable in-process for tests.

#include <iosfwd>
#include <string>
#include <vector>

#include "fcm/errors.hpp"

namespace fcm::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kParse = 3,
  kValidation = 4,
  kUnconverged = 5,
  kIo = 6,
  kNotFound = 7,
};

int exit_code_for(ErrorKind kind);

/// `args` excludes the program name. Reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fcm::cli
