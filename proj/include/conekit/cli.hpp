/* Copyright 2026 The conekit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef CONEKIT_CLI_HPP
#define CONEKIT_CLI_HPP

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace conekit {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFindings = 1;  // ran, but found problems or failed a gate
inline constexpr int kExitUsage = 2;     // bad usage or input contract violation

/// Runs the `conekit` command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::map<std::string, std::string>& env = {});

}  // namespace conekit

#endif  // CONEKIT_CLI_HPP
