// Copyright 2026 The OptiLoop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Command-line front end. Kept apart from main() so tests can drive it.

#ifndef OPTILOOP_TOOLS_CLI_HPP
#define OPTILOOP_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace optiloop::cli {

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,
  kParseError = 2,
  kInfeasible = 3,
  kBudgetExceeded = 4,
};

enum class LogLevel { kQuiet, kInfo, kDebug };

/// Reads OPTILOOP_LOG: "quiet" (default), "info" or "debug".
LogLevel log_level_from_env();

/// Runs the tool on `args` (without the program name). Normal output goes
/// to `out`, diagnostics and logs to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err, LogLevel level = LogLevel::kQuiet);

}  // namespace optiloop::cli

#endif  // OPTILOOP_TOOLS_CLI_HPP
