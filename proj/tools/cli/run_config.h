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

#ifndef GROUNDING_TOOLS_RUN_CONFIG_H_
#define GROUNDING_TOOLS_RUN_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "grounding/analysis.h"
#include "grounding/classifier.h"

namespace grounding::cli {

// Everything a pipeline run needs. Loaded from a `key = value` file; command
// line flags are applied on top (defaults < file < flags).
struct RunConfig {
  std::string corpus;
  std::string pairs;
  std::string annotations;
  std::map<int64_t, std::string> embeddings;  // context width -> NGEMB1 path
  std::string lexicon;
  std::string profiles;
  std::string predictions;
  std::string model_dir = "models";
  std::string report_dir = "reports";

  TrainConfig train;
  SplitSpec split;
  MobilityParams mobility;
  size_t top_k = 500;
  uint64_t seed = 0;

  // Sorted `key = value` lines; the hash of this text identifies the run.
  std::string Canonical() const;
  std::string Hash() const;

  // Propagates the global seed into the named sub-streams.
  void Finalize();
};

// Sets one key. Relative paths are resolved against `base_dir` (the config
// file's directory; empty for command-line values). Throws InvalidArgument on
// unknown keys or malformed values.
void SetConfigValue(RunConfig &config, std::string_view key, std::string_view value,
                    const std::string &base_dir = "");

void ParseConfigText(RunConfig &config, std::string_view text,
                     const std::string &base_dir = "");
void LoadConfigFile(RunConfig &config, const std::string &path);

}  // namespace grounding::cli

#endif  // GROUNDING_TOOLS_RUN_CONFIG_H_
