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

#ifndef GROUNDING_ANALYSIS_H_
#define GROUNDING_ANALYSIS_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "grounding/annotation.h"
#include "grounding/random.h"

namespace grounding {

// One spatial prediction for a character/place co-mention.
struct GroundingPrediction {
  std::string pair_id;
  std::string doc_id;
  std::string character_id;  // coreference entity id of the character
  std::string place_mention_id;
  std::string place_form;    // normalized surface form
  std::optional<std::string> place_entity_id;
  SpatialRel label = SpatialRel::kNoRel;
  double probability = 0.0;

  // Identity used for distinct counting: the place entity id when present,
  // else the normalized surface form.
  std::string PlaceKey() const;
};

enum class Gender { kHe, kShe, kOtherUnknown };

std::string_view GenderName(Gender g);
std::optional<Gender> ParseGender(std::string_view s);

struct CharacterProfile {
  std::string doc_id;
  std::string entity_id;
  int64_t mention_count = 1;
  Gender gender = Gender::kOtherUnknown;
};

enum class PlaceClass { kIndoor, kOutdoor };

// Normalized place form -> INDOOR/OUTDOOR.
using PlaceLexicon = std::map<std::string, PlaceClass>;

// Lower-cases ASCII letters, trims, and collapses internal whitespace.
std::string NormalizePlaceForm(std::string_view form);

// Number of distinct places among `sample_size` predictions drawn uniformly
// without replacement. Throws InvalidArgument when fewer are available.
int Mobility(const std::vector<GroundingPrediction> &predictions, size_t sample_size,
             Rng &rng);

struct MobilityParams {
  size_t sample_size = 50;
  int repeats = 100;
  int rival_pool = 5;  // rivals are drawn from centrality ranks 2..rival_pool+1
  uint64_t seed = 0;
};

struct MobilityReport {
  // Relative difference (protagonist - rival) / rival of the across-book mean
  // mobilities, as a fraction (0.5 means half again as many places).
  double mean_relative_difference = 0.0;
  double std_relative_difference = 0.0;  // population std over repeats
  int repeats = 0;                       // repeats that had an eligible book
  int repeats_dropped = 0;
  size_t sample_size = 0;
  size_t books_total = 0;
  size_t books_used = 0;     // used in at least one repeat
  size_t books_skipped = 0;
  std::vector<double> per_repeat;
};

// Pairs each book's most mentioned character with a uniformly drawn rival
// from the next `rival_pool` characters, compares mobility over IN
// predictions, and repeats. Books where either member lacks `sample_size` IN
// predictions are skipped for that repeat. Throws InvalidArgument when no
// repeat has an eligible book.
MobilityReport ProtagonistMobilityExperiment(
    const std::vector<GroundingPrediction> &predictions,
    const std::vector<CharacterProfile> &profiles, const MobilityParams &params);

// The same protocol restricted to books whose protagonist has each gender.
// Genders with no eligible book are absent from the result.
std::map<Gender, MobilityReport> GenderStratifiedMobility(
    const std::vector<GroundingPrediction> &predictions,
    const std::vector<CharacterProfile> &profiles, const MobilityParams &params);

inline constexpr double kWaldZ = 1.96;

// z * sqrt(p (1 - p) / n). Throws when n = 0.
double WaldHalfWidth(double p, size_t n, double z = kWaldZ);

struct ProclivityCell {
  double p = 0.0;
  double half_width = 0.0;
  size_t n = 0;
  size_t indoor = 0;
};

struct ProclivityReport {
  std::optional<ProclivityCell> he;
  std::optional<ProclivityCell> she;
  size_t dropped_not_in = 0;
  size_t dropped_unlisted_place = 0;
  size_t dropped_gender = 0;  // OTHER_UNKNOWN or missing profile
};

// P(indoor | gender) over IN predictions whose place is in the lexicon, for
// HE and SHE characters. A gender with no observations is absent.
ProclivityReport IndoorProclivity(const std::vector<GroundingPrediction> &predictions,
                                  const PlaceLexicon &lexicon,
                                  const std::vector<CharacterProfile> &profiles);

// Year buckets: <1873, [1873,1923), [1923,1973), [1973,2020].
inline constexpr std::array<std::string_view, 4> kTemporalBuckets = {
    "<1873", "1873-1923", "1923-1973", "1973-2020"};
std::optional<int> TemporalBucket(int year);

struct TemporalSliceReport {
  std::array<ProclivityReport, 4> buckets;
  size_t docs_without_year = 0;
  size_t docs_out_of_range = 0;
};

TemporalSliceReport TemporalSliceProclivity(
    const std::vector<GroundingPrediction> &predictions, const PlaceLexicon &lexicon,
    const std::vector<CharacterProfile> &profiles,
    const std::map<std::string, std::optional<int>> &doc_years);

struct PlaceFrequency {
  std::string place_form;
  size_t count = 0;
};

// The top_k normalized place forms by IN-prediction frequency (ties by form).
std::vector<PlaceFrequency> BuildPlaceLexicon(
    const std::vector<GroundingPrediction> &predictions, size_t top_k = 500);

// Lexicon TSV, header "place_form\tlabel"; label INDOOR, OUTDOOR, or empty for
// a row not yet labelled (ignored on load).
std::string LexiconSkeletonTsv(const std::vector<PlaceFrequency> &places);
PlaceLexicon ParseLexicon(std::string_view text);
PlaceLexicon LoadLexicon(const std::string &path);

// Predictions JSONL, one GroundingPrediction per line.
std::string SerializePredictions(const std::vector<GroundingPrediction> &predictions);
std::vector<GroundingPrediction> ParsePredictions(std::string_view text);
std::vector<GroundingPrediction> LoadPredictions(const std::string &path);

// Profiles JSONL: {"doc_id","entity_id","mention_count","gender"}.
std::vector<CharacterProfile> ParseProfiles(std::string_view text);
std::vector<CharacterProfile> LoadProfiles(const std::string &path);

std::string MobilityReportJson(const MobilityReport &report);
std::string ProclivityReportJson(const ProclivityReport &report);
std::string TemporalSliceReportJson(const TemporalSliceReport &report);
// bucket,gender,p,ci_low,ci_high,n
std::string ProclivityCsv(const ProclivityReport &report, std::string_view bucket = "all");
std::string TemporalSliceCsv(const TemporalSliceReport &report);

}  // namespace grounding

#endif  // GROUNDING_ANALYSIS_H_
