// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace udeg::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kRuntimeError = 2,
  kPartialSuccess = 3,
};

/// Runs one `udeg` invocation. `args` excludes the program name. Results go
/// to `out`, diagnostics and logs to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace udeg::cli
