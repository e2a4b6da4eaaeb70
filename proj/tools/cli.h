// Copyright 2026 The TrojanDec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TROJANDEC_TOOLS_CLI_H_
#define TROJANDEC_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace trojandec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitService = 3;

// Runs one command line (args excludes the program name). JSON results go
// to out unless redirected with --json; diagnostics go to err as one line.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trojandec::cli

#endif  // TROJANDEC_TOOLS_CLI_H_
