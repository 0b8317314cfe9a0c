// Copyright 2026 The Grounding Authors.
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

#ifndef GROUNDING_TOOLS_CLI_H_
#define GROUNDING_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace grounding::cli {

// Runs the `grounding` command line. `args` excludes the program name.
// Returns the process exit code: 0 iff every output was written. Failures are
// reported on `err` as one JSON line {"error": kind, "message": text}.
int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace grounding::cli

#endif  // GROUNDING_TOOLS_CLI_H_
