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

#include <benchmark/benchmark.h>

#include "grounding/corpus.h"
#include "grounding/random.h"

namespace grounding {
namespace {

// A book-length document with one mention every `spacing` tokens.
Document Book(int64_t tokens, int64_t spacing) {
  Rng rng(4);
  Document doc;
  doc.doc_id = "book";
  for (int64_t i = 0; i < tokens; ++i) doc.tokens.push_back({i, "w"});
  int id = 0;
  for (int64_t start = 0; start + 1 < tokens; start += spacing) {
    EntityMention m;
    m.mention_id = "m" + std::to_string(id++);
    m.entity_type = static_cast<EntityType>(rng.UniformInt(4));
    m.start = start;
    m.end = start + static_cast<int64_t>(rng.UniformInt(2));
    doc.mentions.push_back(m);
  }
  return doc;
}

void BM_ExtractCandidatePairs(benchmark::State &state) {
  Document doc = Book(state.range(0), state.range(1));
  size_t pairs = 0;
  for (auto _ : state) {
    auto out = ExtractCandidatePairs(doc);
    pairs = out.size();
    benchmark::DoNotOptimize(out);
  }
  state.counters["pairs"] = static_cast<double>(pairs);
  state.counters["mentions"] = static_cast<double>(doc.mentions.size());
}
BENCHMARK(BM_ExtractCandidatePairs)->Args({2000, 8})->Args({20000, 8})->Args({20000, 6});

}  // namespace
}  // namespace grounding
