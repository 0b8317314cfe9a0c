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

#ifndef GROUNDING_CORPUS_H_
#define GROUNDING_CORPUS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace grounding {

enum class EntityType { kPer, kLoc, kFac, kGpe };

std::string_view EntityTypeName(EntityType type);
// Parses "PER", "LOC", "FAC" or "GPE". Returns nullopt otherwise.
std::optional<EntityType> ParseEntityType(std::string_view name);

inline bool IsPlaceType(EntityType type) { return type != EntityType::kPer; }

struct Token {
  int64_t index = 0;
  std::string text;
};

// A typed entity span. `start` and `end` are both inclusive token indices.
struct EntityMention {
  std::string mention_id;
  EntityType entity_type = EntityType::kPer;
  int64_t start = 0;
  int64_t end = 0;
  std::optional<std::string> entity_id;

  int64_t length() const { return end - start + 1; }
  bool operator==(const EntityMention &) const = default;
};

struct Document {
  std::string doc_id;
  std::optional<int> year;
  std::vector<Token> tokens;
  std::vector<EntityMention> mentions;

  int64_t size() const { return static_cast<int64_t>(tokens.size()); }

  // Surface text of a span, tokens joined by single spaces.
  std::string SpanText(int64_t start, int64_t end) const;
};

// Inclusive token index range.
struct TokenRange {
  int64_t first = 0;
  int64_t last = 0;

  int64_t length() const { return last - first + 1; }
  bool Contains(int64_t start, int64_t end) const {
    return start >= first && end <= last;
  }
  bool operator==(const TokenRange &) const = default;
};

struct CandidatePair {
  std::string pair_id;
  std::string doc_id;
  EntityMention character;
  EntityMention place;
  int64_t distance = 0;
  // Surface forms of both mentions; filled by extraction, carried in the
  // pair export so downstream stages do not need the corpus.
  std::string character_text;
  std::string place_text;
};

inline constexpr int64_t kDefaultMaxGap = 10;

// "<doc_id>:<char mention_id>:<place mention_id>"
std::string MakePairId(std::string_view doc_id, std::string_view character_id,
                       std::string_view place_id);

// Distance between a character span and a place span under the co-mention
// rule: if the character ends after the place starts, the character end minus
// the place start; otherwise the place end minus the character start. The
// rule is intentionally asymmetric.
int64_t MentionDistance(const EntityMention &character,
                        const EntityMention &place);

// All PER x {LOC, FAC, GPE} mention pairs with MentionDistance <= max_gap,
// ordered by character (start, end, id) then place (start, end, id).
// Repeated mentions of the same entities yield one pair per mention pair.
std::vector<CandidatePair> ExtractCandidatePairs(const Document &doc,
                                                 int64_t max_gap = kDefaultMaxGap);

// [max(0, first mention start - width), min(n - 1, last mention end + width)]
// over the union of both mention spans.
TokenRange ContextWindow(const CandidatePair &pair, int64_t doc_length,
                         int64_t width);

// Checks the Document invariants; throws InvalidArgument naming the problem.
void ValidateDocument(const Document &doc);

// JSON-lines ingestion. Throws ParseError naming the 1-based line number and
// the offending field.
std::vector<Document> ParseCorpus(std::string_view text);
std::vector<Document> LoadCorpus(const std::string &path);
std::string SerializeDocument(const Document &doc);

// Pair export: one JSON object per line.
std::string SerializePairs(const std::vector<CandidatePair> &pairs);
std::vector<CandidatePair> ParsePairs(std::string_view text);
std::vector<CandidatePair> LoadPairs(const std::string &path);

}  // namespace grounding

#endif  // GROUNDING_CORPUS_H_
