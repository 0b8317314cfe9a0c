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

#include "grounding/corpus.h"

#include <algorithm>

#include <gtest/gtest.h>

#include "grounding/error.h"
#include "grounding/random.h"
#include "oracles.h"
#include "synthetic.h"

namespace grounding {
namespace {

EntityMention Mention(const std::string &id, EntityType type, int64_t start, int64_t end) {
  EntityMention m;
  m.mention_id = id;
  m.entity_type = type;
  m.start = start;
  m.end = end;
  return m;
}

Document Blank(int64_t n, const std::string &id = "d") {
  Document doc;
  doc.doc_id = id;
  for (int64_t i = 0; i < n; ++i) doc.tokens.push_back({i, "t" + std::to_string(i)});
  return doc;
}

CandidatePair PairOf(const EntityMention &c, const EntityMention &l) {
  CandidatePair p;
  p.character = c;
  p.place = l;
  return p;
}

TEST(MentionDistance, CharacterBeforePlace) {
  auto c = Mention("c", EntityType::kPer, 5, 6);
  auto l = Mention("l", EntityType::kLoc, 10, 11);
  EXPECT_EQ(MentionDistance(c, l), 6);
}

TEST(MentionDistance, PlaceFarBeforeCharacter) {
  auto c = Mention("c", EntityType::kPer, 20, 20);
  auto l = Mention("l", EntityType::kLoc, 3, 4);
  EXPECT_EQ(MentionDistance(c, l), 17);
  Document doc = Blank(30);
  doc.mentions = {c, l};
  EXPECT_TRUE(ExtractCandidatePairs(doc).empty());
}

TEST(MentionDistance, IsAsymmetric) {
  // Swapping the roles changes which endpoints are compared.
  auto a = Mention("a", EntityType::kPer, 0, 8);
  auto b = Mention("b", EntityType::kPer, 2, 3);
  EXPECT_EQ(MentionDistance(a, b), 6);
  EXPECT_EQ(MentionDistance(b, a), 3);
}

TEST(ExtractCandidatePairs, BoundaryGapIsInclusive) {
  Document doc = Blank(40);
  doc.mentions = {Mention("c", EntityType::kPer, 0, 0), Mention("l10", EntityType::kGpe, 10, 10),
                  Mention("l11", EntityType::kGpe, 11, 11)};
  auto pairs = ExtractCandidatePairs(doc);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].place.mention_id, "l10");
  EXPECT_EQ(pairs[0].distance, 10);
  EXPECT_EQ(pairs[0].pair_id, "d:c:l10");
}

TEST(ExtractCandidatePairs, OnlyPersonPlacePairs) {
  Document doc = Blank(10);
  doc.mentions = {Mention("p1", EntityType::kPer, 0, 0), Mention("p2", EntityType::kPer, 1, 1),
                  Mention("f", EntityType::kFac, 2, 2), Mention("l", EntityType::kLoc, 3, 3)};
  auto pairs = ExtractCandidatePairs(doc);
  EXPECT_EQ(pairs.size(), 4u);
  for (const auto &p : pairs) {
    EXPECT_EQ(p.character.entity_type, EntityType::kPer);
    EXPECT_TRUE(IsPlaceType(p.place.entity_type));
  }
}

TEST(ExtractCandidatePairs, NoCharacterOrNoPlace) {
  Document doc = Blank(10);
  doc.mentions = {Mention("p1", EntityType::kPer, 0, 0)};
  EXPECT_TRUE(ExtractCandidatePairs(doc).empty());
  doc.mentions = {Mention("l", EntityType::kLoc, 0, 0)};
  EXPECT_TRUE(ExtractCandidatePairs(doc).empty());
}

TEST(ExtractCandidatePairs, OverlappingSpans) {
  Document doc = Blank(10);
  doc.mentions = {Mention("c", EntityType::kPer, 2, 5), Mention("l", EntityType::kLoc, 3, 4)};
  auto pairs = ExtractCandidatePairs(doc);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].distance, 2);
}

TEST(ExtractCandidatePairs, RepeatedEntitiesYieldOnePairPerMentionPair) {
  Document doc = Blank(20);
  auto c1 = Mention("c1", EntityType::kPer, 0, 0);
  auto c2 = Mention("c2", EntityType::kPer, 4, 4);
  c1.entity_id = c2.entity_id = "alice";
  auto l1 = Mention("l1", EntityType::kFac, 2, 2);
  auto l2 = Mention("l2", EntityType::kFac, 6, 6);
  l1.entity_id = l2.entity_id = "hall";
  doc.mentions = {c1, c2, l1, l2};
  EXPECT_EQ(ExtractCandidatePairs(doc).size(), 4u);
}

TEST(ExtractCandidatePairs, SurfaceTextAndOrdering) {
  Document doc = Blank(12);
  doc.mentions = {Mention("l", EntityType::kLoc, 6, 7), Mention("c2", EntityType::kPer, 3, 3),
                  Mention("c1", EntityType::kPer, 0, 1)};
  auto pairs = ExtractCandidatePairs(doc);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].character.mention_id, "c1");
  EXPECT_EQ(pairs[0].character_text, "t0 t1");
  EXPECT_EQ(pairs[0].place_text, "t6 t7");
}

TEST(ExtractCandidatePairs, MatchesBruteForceAndIgnoresMentionOrder) {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    Document doc = testing::RandomDocument(rng, "doc" + std::to_string(i));
    auto got = ExtractCandidatePairs(doc);
    EXPECT_EQ(testing::AsTriples(got), testing::BruteForcePairs(doc, kDefaultMaxGap));
    Document shuffled = doc;
    rng.Shuffle(shuffled.mentions);
    auto again = ExtractCandidatePairs(shuffled);
    ASSERT_EQ(again.size(), got.size());
    for (size_t k = 0; k < got.size(); ++k) EXPECT_EQ(again[k].pair_id, got[k].pair_id);
  }
}

TEST(ContextWindow, SpecExamples) {
  auto a = PairOf(Mention("c", EntityType::kPer, 5, 6), Mention("l", EntityType::kLoc, 10, 11));
  EXPECT_EQ(ContextWindow(a, 100, 10), (TokenRange{0, 21}));
  auto b = PairOf(Mention("c", EntityType::kPer, 50, 50), Mention("l", EntityType::kLoc, 55, 56));
  EXPECT_EQ(ContextWindow(b, 100, 10), (TokenRange{40, 66}));
  EXPECT_EQ(ContextWindow(a, 30, 50), (TokenRange{0, 29}));
}

TEST(ContextWindow, PlaceFirstAndContainsBothSpans) {
  auto p = PairOf(Mention("c", EntityType::kPer, 30, 31), Mention("l", EntityType::kLoc, 20, 22));
  TokenRange w = ContextWindow(p, 100, 5);
  EXPECT_EQ(w, (TokenRange{15, 36}));
  EXPECT_TRUE(w.Contains(30, 31));
  EXPECT_TRUE(w.Contains(20, 22));
}

TEST(ContextWindow, RejectsBadArguments) {
  auto p = PairOf(Mention("c", EntityType::kPer, 0, 0), Mention("l", EntityType::kLoc, 1, 1));
  EXPECT_THROW(ContextWindow(p, 10, 0), InvalidArgument);
  EXPECT_THROW(ContextWindow(p, 0, 5), InvalidArgument);
}

TEST(ParseCorpus, RoundTripsDocuments) {
  Rng rng(3);
  std::string text;
  std::vector<Document> docs;
  for (int i = 0; i < 5; ++i) {
    docs.push_back(testing::RandomDocument(rng, "doc" + std::to_string(i), 30, 5));
    if (i % 2 == 0) docs.back().year = 1800 + i;
    text += SerializeDocument(docs.back()) + "\n";
  }
  auto parsed = ParseCorpus(text);
  ASSERT_EQ(parsed.size(), docs.size());
  std::string again;
  for (const Document &d : parsed) again += SerializeDocument(d) + "\n";
  EXPECT_EQ(again, text);
  EXPECT_EQ(parsed[0].year, 1800);
  EXPECT_FALSE(parsed[1].year.has_value());
}

TEST(ParseCorpus, ErrorsNameLineAndField) {
  const std::string good =
      R"({"doc_id":"a","tokens":["x","y"],"mentions":[{"mention_id":"m","entity_type":"PER","start":0,"end":1}]})";
  EXPECT_EQ(ParseCorpus(good + "\n").size(), 1u);
  auto message = [](const std::string &text) {
    try {
      ParseCorpus(text);
    } catch (const ParseError &e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message(good + "\n{\"doc_id\":\"b\"}\n").find("line 2"), std::string::npos);
  EXPECT_NE(message(good + "\n{\"doc_id\":\"b\"}\n").find("tokens"), std::string::npos);
  EXPECT_NE(message(good + "\n" + good + "\n").find("duplicate doc_id"), std::string::npos);
  EXPECT_NE(message("not json\n").find("line 1"), std::string::npos);
  const std::string bad_span =
      R"({"doc_id":"a","tokens":["x"],"mentions":[{"mention_id":"m","entity_type":"PER","start":0,"end":3}]})";
  EXPECT_THROW(ParseCorpus(bad_span), ParseError);
  const std::string bad_type =
      R"({"doc_id":"a","tokens":["x"],"mentions":[{"mention_id":"m","entity_type":"ORG","start":0,"end":0}]})";
  EXPECT_THROW(ParseCorpus(bad_type), ParseError);
  const std::string dup_mention =
      R"({"doc_id":"a","tokens":["x"],"mentions":[{"mention_id":"m","entity_type":"PER","start":0,"end":0},{"mention_id":"m","entity_type":"LOC","start":0,"end":0}]})";
  EXPECT_THROW(ParseCorpus(dup_mention), ParseError);
}

TEST(ParsePairs, RoundTripsExtraction) {
  Rng rng(11);
  std::vector<CandidatePair> all;
  for (int i = 0; i < 20; ++i) {
    auto pairs = ExtractCandidatePairs(testing::RandomDocument(rng, "d" + std::to_string(i)));
    all.insert(all.end(), pairs.begin(), pairs.end());
  }
  ASSERT_FALSE(all.empty());
  const std::string text = SerializePairs(all);
  auto parsed = ParsePairs(text);
  ASSERT_EQ(parsed.size(), all.size());
  EXPECT_EQ(SerializePairs(parsed), text);
  EXPECT_EQ(parsed[0].character_text, all[0].character_text);
}

TEST(ParsePairs, RejectsDuplicatesAndWrongTypes) {
  Document doc = Blank(5);
  doc.mentions = {Mention("c", EntityType::kPer, 0, 0), Mention("l", EntityType::kLoc, 1, 1)};
  std::string line = SerializePairs(ExtractCandidatePairs(doc));
  EXPECT_THROW(ParsePairs(line + line), ParseError);
  CandidatePair swapped = ExtractCandidatePairs(doc)[0];
  std::swap(swapped.character, swapped.place);
  EXPECT_THROW(ParsePairs(SerializePairs({swapped})), ParseError);
}

}  // namespace
}  // namespace grounding
