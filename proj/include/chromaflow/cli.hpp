/* Copyright 2026 The ChromaFlow Authors. All Rights Reserved.

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

#ifndef CHROMAFLOW_CLI_HPP_
#define CHROMAFLOW_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace chromaflow {

// Process exit codes of the chromaflow tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;          // bad flags, unreadable or malformed input
inline constexpr int kExitAttackFailed = 3;
inline constexpr int kExitNumeric = 4;

// Runs the tool with argv-style arguments (args[0] is the program name).
// Normal output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chromaflow

#endif  // CHROMAFLOW_CLI_HPP_
