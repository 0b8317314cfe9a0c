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

#include "cli/run_config.h"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "grounding/error.h"
#include "grounding/io.h"
#include "grounding/random.h"

namespace grounding::cli {

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view value) {
  T out{};
  if constexpr (std::is_floating_point_v<T>) {
    try {
      size_t used = 0;
      std::string s(value);
      out = static_cast<T>(std::stod(s, &used));
      if (used != s.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception &) {
      throw InvalidArgument("config key '" + std::string(key) + "': expected a number, got '" +
                            std::string(value) + "'");
    }
  } else {
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw InvalidArgument("config key '" + std::string(key) +
                            "': expected an integer, got '" + std::string(value) + "'");
    }
  }
  return out;
}

std::string ResolvePath(std::string_view value, const std::string &base_dir) {
  std::filesystem::path p{std::string(value)};
  if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
  return p.lexically_normal().string();
}

std::string Real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string RunConfig::Canonical() const {
  std::map<std::string, std::string> kv = {
      {"corpus", corpus},
      {"pairs", pairs},
      {"annotations", annotations},
      {"lexicon", lexicon},
      {"profiles", profiles},
      {"predictions", predictions},
      {"model_dir", model_dir},
      {"report_dir", report_dir},
      {"seed", std::to_string(seed)},
      {"train.learning_rate", Real(train.learning_rate)},
      {"train.max_epochs", std::to_string(train.max_epochs)},
      {"train.batch_size", std::to_string(train.batch_size)},
      {"train.context_width", std::to_string(train.context_width)},
      {"train.hidden_layers", std::to_string(train.hidden_layers)},
      {"train.hidden_width", std::to_string(train.hidden_width)},
      {"train.optimizer", std::string(OptimizerName(train.optimizer))},
      {"split.train", Real(split.train)},
      {"split.dev", Real(split.dev)},
      {"split.test", Real(split.test)},
      {"analysis.sample_size", std::to_string(mobility.sample_size)},
      {"analysis.repeats", std::to_string(mobility.repeats)},
      {"analysis.rival_pool", std::to_string(mobility.rival_pool)},
      {"analysis.top_k", std::to_string(top_k)},
  };
  for (const auto &[width, path] : embeddings) {
    kv["embeddings." + std::to_string(width)] = path;
  }
  std::string out;
  for (const auto &[k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::string RunConfig::Hash() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(Fnv1a64(Canonical())));
  return buf;
}

void RunConfig::Finalize() {
  train.rng_seed = DeriveSeed(seed, "train");
  split.seed = DeriveSeed(seed, "split");
  mobility.seed = DeriveSeed(seed, "analysis");
}

void SetConfigValue(RunConfig &c, std::string_view key, std::string_view value,
                    const std::string &base_dir) {
  key = Trim(key);
  value = Trim(value);
  const std::string k(key);
  auto path = [&] { return ResolvePath(value, base_dir); };
  if (k == "corpus") {
    c.corpus = path();
  } else if (k == "pairs") {
    c.pairs = path();
  } else if (k == "annotations") {
    c.annotations = path();
  } else if (k == "lexicon") {
    c.lexicon = path();
  } else if (k == "profiles") {
    c.profiles = path();
  } else if (k == "predictions") {
    c.predictions = path();
  } else if (k == "model_dir") {
    c.model_dir = path();
  } else if (k == "report_dir") {
    c.report_dir = path();
  } else if (k.rfind("embeddings.", 0) == 0) {
    auto width = ParseNumber<int64_t>(key, key.substr(11));
    if (width < 1) throw InvalidArgument("config key '" + k + "': width must be positive");
    c.embeddings[width] = path();
  } else if (k == "seed") {
    c.seed = ParseNumber<uint64_t>(key, value);
  } else if (k == "train.learning_rate") {
    c.train.learning_rate = ParseNumber<double>(key, value);
  } else if (k == "train.max_epochs") {
    c.train.max_epochs = ParseNumber<int>(key, value);
  } else if (k == "train.batch_size") {
    c.train.batch_size = ParseNumber<int>(key, value);
  } else if (k == "train.context_width") {
    c.train.context_width = ParseNumber<int64_t>(key, value);
  } else if (k == "train.hidden_layers") {
    c.train.hidden_layers = ParseNumber<int>(key, value);
  } else if (k == "train.hidden_width") {
    c.train.hidden_width = ParseNumber<size_t>(key, value);
  } else if (k == "train.optimizer") {
    auto o = ParseOptimizer(value);
    if (!o) throw InvalidArgument("config key 'train.optimizer': expected sgd or adam");
    c.train.optimizer = *o;
  } else if (k == "split.train") {
    c.split.train = ParseNumber<double>(key, value);
  } else if (k == "split.dev") {
    c.split.dev = ParseNumber<double>(key, value);
  } else if (k == "split.test") {
    c.split.test = ParseNumber<double>(key, value);
  } else if (k == "analysis.sample_size") {
    c.mobility.sample_size = ParseNumber<size_t>(key, value);
  } else if (k == "analysis.repeats") {
    c.mobility.repeats = ParseNumber<int>(key, value);
  } else if (k == "analysis.rival_pool") {
    c.mobility.rival_pool = ParseNumber<int>(key, value);
  } else if (k == "analysis.top_k") {
    c.top_k = ParseNumber<size_t>(key, value);
  } else {
    throw InvalidArgument("unknown config key '" + k + "'");
  }
}

void ParseConfigText(RunConfig &config, std::string_view text, const std::string &base_dir) {
  std::vector<std::string> lines = SplitLines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(i + 1) + ": expected 'key = value'");
    }
    try {
      SetConfigValue(config, line.substr(0, eq), line.substr(eq + 1), base_dir);
    } catch (const InvalidArgument &e) {
      throw ParseError("config line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
}

void LoadConfigFile(RunConfig &config, const std::string &path) {
  std::filesystem::path p(path);
  ParseConfigText(config, ReadFile(path),
                  p.has_parent_path() ? p.parent_path().string() : std::string());
}

}  // namespace grounding::cli
