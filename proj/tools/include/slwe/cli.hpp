// Copyright 2026 The slwe Authors
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

#ifndef SLWE_CLI_HPP_
#define SLWE_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace slwe::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;
inline constexpr int kExitNotRecovered = 4;

/// Environment variable holding the default for --jobs.
inline constexpr const char* kJobsEnv = "SLWE_JOBS";

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses a real number, accepting the power form "B^E" (e.g. "2^-128").
double parse_real(const std::string& text);

}  // namespace slwe::cli

#endif  // SLWE_CLI_HPP_
