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

#ifndef GROUNDING_IO_H_
#define GROUNDING_IO_H_

#include <string>
#include <string_view>
#include <vector>

namespace grounding {

std::string ReadFile(const std::string &path);

// Writes to a temporary sibling file and renames it over `path`, so readers
// never observe a partially written file.
void WriteFileAtomic(const std::string &path, std::string_view contents);

// Splits on '\n'. A trailing newline does not produce an empty last line;
// a trailing '\r' on each line is removed.
std::vector<std::string> SplitLines(std::string_view text);

std::vector<std::string> SplitTabs(std::string_view line);

}  // namespace grounding

#endif  // GROUNDING_IO_H_
