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

#include "grounding/annotation.h"

#include <cmath>

#include <gtest/gtest.h>

#include "grounding/error.h"
#include "grounding/random.h"
#include "oracles.h"
#include "synthetic.h"

namespace grounding {
namespace {

using testing::InvalidRecord;
using testing::SpatialRecord;

std::vector<AnnotationRecord> Spatial(const std::string &annotator,
                                      const std::vector<SpatialRel> &labels) {
  std::vector<AnnotationRecord> out;
  for (size_t i = 0; i < labels.size(); ++i) {
    out.push_back(SpatialRecord("p" + std::to_string(i), annotator, labels[i]));
  }
  return out;
}

TEST(Labels, VocabulariesAndParsing) {
  EXPECT_EQ(TaskLabels(Task::kSpatial),
            (std::vector<std::string>{"IN", "NEAR", "THRU", "TO", "FROM", "NO_REL"}));
  EXPECT_EQ(TaskLabels(Task::kValidity).size(), 2u);
  EXPECT_EQ(LabelIndex(Task::kSpatial, "TO"), 3);
  EXPECT_FALSE(LabelIndex(Task::kSpatial, "ON").has_value());
  EXPECT_EQ(ParseTask("tense"), Task::kTense);
  EXPECT_FALSE(ParseTask("mood").has_value());
  for (Task t : {Task::kValidity, Task::kSpatial, Task::kTemporal, Task::kTense}) {
    EXPECT_EQ(ParseTask(TaskName(t)), t);
  }
}

TEST(AnnotationRecord, InvalidPairsCarryOnlyValidity) {
  AnnotationRecord r = InvalidRecord("p", "a");
  EXPECT_EQ(r.Label(Task::kValidity), 1);
  EXPECT_FALSE(r.Label(Task::kSpatial).has_value());
  EXPECT_NO_THROW(ValidateRecord(r));
  r.spatial = SpatialRel::kIn;
  EXPECT_THROW(ValidateRecord(r), InvalidArgument);
  AnnotationRecord v = SpatialRecord("p", "a", SpatialRel::kNear);
  v.spatial.reset();
  EXPECT_THROW(ValidateRecord(v), InvalidArgument);
}

TEST(CohenKappa, PerfectAgreement) {
  auto a = Spatial("a", {SpatialRel::kIn, SpatialRel::kNear, SpatialRel::kTo, SpatialRel::kIn});
  auto b = Spatial("b", {SpatialRel::kIn, SpatialRel::kNear, SpatialRel::kTo, SpatialRel::kIn});
  EXPECT_NEAR(CohenKappa(a, b, Task::kSpatial).kappa, 1.0, 1e-9);
}

TEST(CohenKappa, ChanceAgreementIsZero) {
  auto a = Spatial("a", {SpatialRel::kIn, SpatialRel::kIn, SpatialRel::kNear, SpatialRel::kNear});
  auto b = Spatial("b", {SpatialRel::kIn, SpatialRel::kNear, SpatialRel::kIn, SpatialRel::kNear});
  KappaResult k = CohenKappa(a, b, Task::kSpatial);
  EXPECT_NEAR(k.kappa, 0.0, 1e-9);
  EXPECT_NEAR(k.observed, 0.5, 1e-12);
  EXPECT_NEAR(k.expected, 0.5, 1e-12);
}

TEST(CohenKappa, WorkedExample) {
  auto a = Spatial("a", {SpatialRel::kIn, SpatialRel::kIn, SpatialRel::kNear, SpatialRel::kTo});
  auto b = Spatial("b", {SpatialRel::kIn, SpatialRel::kNear, SpatialRel::kNear, SpatialRel::kTo});
  KappaResult k = CohenKappa(a, b, Task::kSpatial);
  EXPECT_NEAR(k.observed, 0.75, 1e-12);
  EXPECT_NEAR(k.expected, 0.3125, 1e-12);
  EXPECT_NEAR(k.kappa, 0.6363636363636364, 1e-9);
  EXPECT_EQ(k.confusion[0][1], 1u);
  EXPECT_EQ(k.n, 4u);
}

TEST(CohenKappa, MatchesConfusionOracleAndIsSymmetric) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const size_t n = 5 + rng.UniformInt(40);
    std::vector<SpatialRel> la, lb;
    std::vector<int> ia, ib;
    for (size_t i = 0; i < n; ++i) {
      ia.push_back(static_cast<int>(rng.UniformInt(6)));
      ib.push_back(rng.UniformInt(3) == 0 ? static_cast<int>(rng.UniformInt(6)) : ia.back());
      la.push_back(static_cast<SpatialRel>(ia.back()));
      lb.push_back(static_cast<SpatialRel>(ib.back()));
    }
    auto a = Spatial("a", la);
    auto b = Spatial("b", lb);
    KappaResult k;
    try {
      k = CohenKappa(a, b, Task::kSpatial);
    } catch (const InvalidArgument &) {
      continue;  // degenerate draw with p_e = 1
    }
    EXPECT_NEAR(k.kappa, testing::ConfusionKappa(ia, ib, 6), 1e-9);
    EXPECT_NEAR(CohenKappa(b, a, Task::kSpatial).kappa, k.kappa, 1e-12);
    // Record order does not matter.
    rng.Shuffle(a);
    rng.Shuffle(b);
    EXPECT_NEAR(CohenKappa(a, b, Task::kSpatial).kappa, k.kappa, 1e-12);
    // Renaming labels consistently does not matter either.
    std::vector<int> perm = {3, 5, 0, 1, 4, 2};
    auto pa = a, pb = b;
    for (auto &r : pa) r.spatial = static_cast<SpatialRel>(perm[static_cast<int>(*r.spatial)]);
    for (auto &r : pb) r.spatial = static_cast<SpatialRel>(perm[static_cast<int>(*r.spatial)]);
    EXPECT_NEAR(CohenKappa(pa, pb, Task::kSpatial).kappa, k.kappa, 1e-12);
  }
}

TEST(CohenKappa, OnlySharedValidPairsCount) {
  auto a = Spatial("a", {SpatialRel::kIn, SpatialRel::kNear, SpatialRel::kTo});
  auto b = Spatial("b", {SpatialRel::kIn, SpatialRel::kNear});
  b.push_back(InvalidRecord("p2", "b"));
  b.push_back(SpatialRecord("extra", "b", SpatialRel::kFrom));
  EXPECT_EQ(CohenKappa(a, b, Task::kSpatial).n, 2u);
  EXPECT_EQ(CohenKappa(a, b, Task::kValidity).n, 3u);
}

TEST(CohenKappa, DegenerateCases) {
  auto a = Spatial("a", {SpatialRel::kIn, SpatialRel::kIn});
  auto b = Spatial("b", {SpatialRel::kIn, SpatialRel::kIn});
  EXPECT_NEAR(CohenKappa(a, b, Task::kSpatial).kappa, 1.0, 1e-12);
  EXPECT_THROW(CohenKappa(a, Spatial("b", {}), Task::kSpatial), InvalidArgument);
  auto dup = a;
  dup.push_back(a[0]);
  EXPECT_THROW(CohenKappa(dup, b, Task::kSpatial), InvalidArgument);
}

TEST(Adjudicate, ResolvesAndIsIdempotent) {
  std::vector<AnnotationRecord> records = {
      SpatialRecord("p1", "a", SpatialRel::kIn),   SpatialRecord("p1", "b", SpatialRel::kIn),
      SpatialRecord("p2", "a", SpatialRel::kIn),   SpatialRecord("p2", "b", SpatialRel::kNear),
      SpatialRecord("p2", "adj", SpatialRel::kTo), SpatialRecord("p0", "a", SpatialRel::kFrom)};
  auto gold = Adjudicate(records, "adj");
  ASSERT_EQ(gold.size(), 3u);
  EXPECT_EQ(gold[0].pair_id, "p0");
  EXPECT_EQ(gold[1].spatial, SpatialRel::kIn);
  EXPECT_EQ(gold[2].spatial, SpatialRel::kTo);
  for (const auto &g : gold) EXPECT_EQ(g.annotator_id, "adj");
  EXPECT_EQ(Adjudicate(gold, "adj"), gold);
}

TEST(Adjudicate, ListsUnresolvedPairs) {
  std::vector<AnnotationRecord> records = {
      SpatialRecord("p1", "a", SpatialRel::kIn), SpatialRecord("p1", "b", SpatialRel::kNear),
      SpatialRecord("p2", "a", SpatialRel::kIn), InvalidRecord("p2", "b")};
  try {
    Adjudicate(records, "adj");
    FAIL() << "expected an error";
  } catch (const InvalidArgument &e) {
    EXPECT_NE(std::string(e.what()).find("p1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("p2"), std::string::npos);
  }
}

TEST(LabelDistribution, CountsApplicableRecords) {
  auto records = Spatial("a", {SpatialRel::kIn, SpatialRel::kIn, SpatialRel::kNoRel});
  records.push_back(InvalidRecord("x", "a"));
  auto spatial = LabelDistribution(records, Task::kSpatial);
  EXPECT_EQ(spatial["IN"], 2u);
  EXPECT_EQ(spatial["NO_REL"], 1u);
  auto validity = LabelDistribution(records, Task::kValidity);
  EXPECT_EQ(validity["INVALID"], 1u);
  EXPECT_EQ(validity["VALID"], 3u);
}

TEST(AnnotationTsv, CanonicalRoundTrip) {
  const std::string text =
      "pair_id\tannotator_id\tvalidity\tspatial\ttemporal\ttense\tnote\n"
      "d1:m1:m2\tann1\tVALID\tIN\tPUNCTUAL\tONGOING\t\n"
      "d1:m1:m3\tann1\tINVALID\t\t\t\tnot a place\n"
      "d2:m4:m9\tann2\tVALID\tNO_REL\t\t\ttab\\there\\nline \\\\ end\n";
  auto records = ParseAnnotations(text);
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[0].temporal, TemporalSpan::kPunctual);
  EXPECT_EQ(*records[2].note, "tab\there\nline \\ end");
  EXPECT_EQ(SerializeAnnotations(records), text);
}

TEST(AnnotationTsv, RejectsMalformedInput) {
  const std::string header = "pair_id\tannotator_id\tvalidity\tspatial\ttemporal\ttense\tnote\n";
  EXPECT_THROW(ParseAnnotations("wrong\theader\n"), ParseError);
  EXPECT_THROW(ParseAnnotations(header + "p\ta\tVALID\tON\t\t\t\n"), ParseError);
  EXPECT_THROW(ParseAnnotations(header + "p\ta\tVALID\tIN\n"), ParseError);
  EXPECT_THROW(ParseAnnotations(header + "p\ta\tINVALID\tIN\t\t\t\n"), ParseError);
  EXPECT_EQ(ParseAnnotations(header).size(), 0u);
}

}  // namespace
}  // namespace grounding
