// Copyright 2026 The SEMO Authors
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

#ifndef SEMO_TOOLS__CLI_HPP_
#define SEMO_TOOLS__CLI_HPP_

#include <ostream>
#include <stop_token>
#include <string>
#include <vector>

namespace semo::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,      ///< bad arguments, unreadable input, I/O failure
  kAttention = 2,  ///< inspect found warnings, or analysis is degenerate
};

/**
 * @brief Runs one `semo` subcommand.
 *
 * `args` excludes the program name. Data goes to `out`, diagnostics to
 * `err`. `stop` ends a running `record` loop.
 */
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err,
        std::stop_token stop = {});

} // namespace semo::cli

#endif // SEMO_TOOLS__CLI_HPP_
