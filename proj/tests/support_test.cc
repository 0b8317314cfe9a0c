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

#include <filesystem>
#include <set>

#include <gtest/gtest.h>

#include "cli/run_config.h"
#include "grounding/error.h"
#include "grounding/io.h"
#include "grounding/random.h"

namespace grounding {
namespace {

TEST(Rng, ReproducibleAndBounded) {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
  Rng r(6);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const uint64_t v = r.UniformInt(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_GT(h, 800);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.UniformUnit();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Rng, SampleWithoutReplacementIsDistinct) {
  Rng r(1);
  auto s = r.SampleWithoutReplacement(30, 30);
  EXPECT_EQ(std::set<size_t>(s.begin(), s.end()).size(), 30u);
  auto t = r.SampleWithoutReplacement(100, 10);
  EXPECT_EQ(std::set<size_t>(t.begin(), t.end()).size(), 10u);
  for (size_t v : t) EXPECT_LT(v, 100u);
}

TEST(DeriveSeed, StreamsDiffer) {
  EXPECT_EQ(DeriveSeed(1, "split"), DeriveSeed(1, "split"));
  EXPECT_NE(DeriveSeed(1, "split"), DeriveSeed(1, "init"));
  EXPECT_NE(DeriveSeed(1, "split"), DeriveSeed(2, "split"));
  EXPECT_NE(DeriveSeed(1, "sampling", 0), DeriveSeed(1, "sampling", 1));
}

TEST(Io, LinesTabsAndAtomicWrite) {
  EXPECT_EQ(SplitLines("a\r\nb\n\nc"), (std::vector<std::string>{"a", "b", "", "c"}));
  EXPECT_EQ(SplitLines("a\n"), (std::vector<std::string>{"a"}));
  EXPECT_EQ(SplitTabs("x\t\ty"), (std::vector<std::string>{"x", "", "y"}));
  const std::string dir = ::testing::TempDir() + "/grounding_io_test/nested";
  std::filesystem::remove_all(dir);
  WriteFileAtomic(dir + "/f.txt", "hello");
  EXPECT_EQ(ReadFile(dir + "/f.txt"), "hello");
  WriteFileAtomic(dir + "/f.txt", "bye");
  EXPECT_EQ(ReadFile(dir + "/f.txt"), "bye");
  EXPECT_THROW(ReadFile(dir + "/missing"), Error);
}

TEST(RunConfig, ParsesOverridesAndHashes) {
  cli::RunConfig c;
  cli::ParseConfigText(c,
                       "# comment\n"
                       "corpus = data/corpus.jsonl\n"
                       "embeddings.100 = emb/w100.ngemb\n"
                       "train.learning_rate = 0.001\n"
                       "train.optimizer = adam\n"
                       "split.train = 0.8\nsplit.dev = 0.1\nsplit.test = 0.1\n"
                       "analysis.repeats = 7\n"
                       "seed = 9\n",
                       "/base");
  EXPECT_EQ(c.corpus, "/base/data/corpus.jsonl");
  EXPECT_EQ(c.embeddings.at(100), "/base/emb/w100.ngemb");
  EXPECT_DOUBLE_EQ(c.train.learning_rate, 0.001);
  EXPECT_EQ(c.train.optimizer, Optimizer::kAdam);
  EXPECT_EQ(c.mobility.repeats, 7);
  const std::string h = c.Hash();
  EXPECT_EQ(h.size(), 16u);
  cli::SetConfigValue(c, "corpus", "/abs/other.jsonl");
  EXPECT_EQ(c.corpus, "/abs/other.jsonl");
  EXPECT_NE(c.Hash(), h);
  c.Finalize();
  EXPECT_EQ(c.split.seed, DeriveSeed(9, "split"));
  EXPECT_EQ(c.train.rng_seed, DeriveSeed(9, "train"));
  EXPECT_THROW(cli::SetConfigValue(c, "nonsense", "1"), InvalidArgument);
  EXPECT_THROW(cli::SetConfigValue(c, "train.max_epochs", "many"), InvalidArgument);
  cli::RunConfig d;
  EXPECT_THROW(cli::ParseConfigText(d, "corpus\n"), ParseError);
}

}  // namespace
}  // namespace grounding
