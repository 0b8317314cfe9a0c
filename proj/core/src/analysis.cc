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

#include "grounding/analysis.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <tuple>
#include <unordered_map>

#include "json.hpp"

#include "grounding/error.h"
#include "grounding/io.h"

namespace grounding {

using nlohmann::json;

namespace {

using CharacterKey = std::pair<std::string, std::string>;  // (doc_id, entity_id)

struct Book {
  std::string doc_id;
  std::string protagonist;
  Gender protagonist_gender = Gender::kOtherUnknown;
  std::vector<std::string> rivals;
};

std::map<CharacterKey, Gender> GenderIndex(const std::vector<CharacterProfile> &profiles) {
  std::map<CharacterKey, Gender> index;
  for (const CharacterProfile &p : profiles) {
    if (!index.emplace(CharacterKey{p.doc_id, p.entity_id}, p.gender).second) {
      throw InvalidArgument("duplicate profile for character '" + p.entity_id +
                            "' in document '" + p.doc_id + "'");
    }
  }
  return index;
}

std::vector<Book> RankBooks(const std::vector<CharacterProfile> &profiles, int rival_pool) {
  GenderIndex(profiles);  // duplicate check
  std::map<std::string, std::vector<const CharacterProfile *>> by_doc;
  for (const CharacterProfile &p : profiles) {
    if (p.mention_count < 1) {
      throw InvalidArgument("profile '" + p.entity_id + "' has mention_count < 1");
    }
    by_doc[p.doc_id].push_back(&p);
  }
  std::vector<Book> books;
  for (auto &[doc_id, chars] : by_doc) {
    std::sort(chars.begin(), chars.end(),
              [](const CharacterProfile *a, const CharacterProfile *b) {
                return std::make_tuple(-a->mention_count, a->entity_id) <
                       std::make_tuple(-b->mention_count, b->entity_id);
              });
    Book book;
    book.doc_id = doc_id;
    book.protagonist = chars.front()->entity_id;
    book.protagonist_gender = chars.front()->gender;
    for (size_t i = 1; i < chars.size() && i <= static_cast<size_t>(rival_pool); ++i) {
      book.rivals.push_back(chars[i]->entity_id);
    }
    books.push_back(std::move(book));
  }
  return books;
}

std::map<CharacterKey, std::vector<GroundingPrediction>> GroupInPredictions(
    const std::vector<GroundingPrediction> &predictions) {
  std::vector<const GroundingPrediction *> in;
  for (const GroundingPrediction &p : predictions) {
    if (p.label == SpatialRel::kIn) in.push_back(&p);
  }
  std::sort(in.begin(), in.end(),
            [](const GroundingPrediction *a, const GroundingPrediction *b) {
              return std::tie(a->pair_id, a->doc_id, a->character_id, a->place_mention_id) <
                     std::tie(b->pair_id, b->doc_id, b->character_id, b->place_mention_id);
            });
  std::map<CharacterKey, std::vector<GroundingPrediction>> groups;
  for (const GroundingPrediction *p : in) groups[{p->doc_id, p->character_id}].push_back(*p);
  return groups;
}

MobilityReport RunMobility(const std::vector<Book> &books,
                           const std::map<CharacterKey, std::vector<GroundingPrediction>> &groups,
                           const MobilityParams &params) {
  if (params.sample_size == 0) throw InvalidArgument("sample_size must be positive");
  if (params.repeats < 1) throw InvalidArgument("repeats must be positive");
  static const std::vector<GroundingPrediction> kEmpty;
  auto predictions_of = [&](const std::string &doc, const std::string &entity)
      -> const std::vector<GroundingPrediction> & {
    auto it = groups.find({doc, entity});
    return it == groups.end() ? kEmpty : it->second;
  };

  MobilityReport report;
  report.sample_size = params.sample_size;
  report.books_total = books.size();
  std::vector<bool> used(books.size(), false);
  for (int r = 0; r < params.repeats; ++r) {
    Rng rng(DeriveSeed(params.seed, "sampling", static_cast<uint64_t>(r)));
    double protagonist_sum = 0.0;
    double rival_sum = 0.0;
    size_t n_books = 0;
    for (size_t b = 0; b < books.size(); ++b) {
      const Book &book = books[b];
      if (book.rivals.empty()) continue;
      const std::string &rival = book.rivals[rng.UniformInt(book.rivals.size())];
      const auto &pp = predictions_of(book.doc_id, book.protagonist);
      const auto &rp = predictions_of(book.doc_id, rival);
      if (pp.size() < params.sample_size || rp.size() < params.sample_size) continue;
      protagonist_sum += Mobility(pp, params.sample_size, rng);
      rival_sum += Mobility(rp, params.sample_size, rng);
      ++n_books;
      used[b] = true;
    }
    if (n_books == 0) {
      ++report.repeats_dropped;
      continue;
    }
    const double protagonist_mean = protagonist_sum / static_cast<double>(n_books);
    const double rival_mean = rival_sum / static_cast<double>(n_books);
    report.per_repeat.push_back((protagonist_mean - rival_mean) / rival_mean);
  }
  if (report.per_repeat.empty()) {
    throw InvalidArgument("no eligible book: every book lacks a protagonist/rival pair with " +
                          std::to_string(params.sample_size) + " IN predictions each");
  }
  report.repeats = static_cast<int>(report.per_repeat.size());
  double sum = 0.0;
  for (double v : report.per_repeat) sum += v;
  report.mean_relative_difference = sum / report.repeats;
  double sq = 0.0;
  for (double v : report.per_repeat) {
    sq += (v - report.mean_relative_difference) * (v - report.mean_relative_difference);
  }
  report.std_relative_difference = std::sqrt(sq / report.repeats);
  report.books_used = static_cast<size_t>(std::count(used.begin(), used.end(), true));
  report.books_skipped = report.books_total - report.books_used;
  return report;
}

void AddObservation(std::map<Gender, std::pair<size_t, size_t>> &counts, Gender g,
                    bool indoor) {
  auto &[in, total] = counts[g];
  in += indoor ? 1 : 0;
  ++total;
}

std::optional<ProclivityCell> MakeCell(const std::map<Gender, std::pair<size_t, size_t>> &counts,
                                       Gender g) {
  auto it = counts.find(g);
  if (it == counts.end() || it->second.second == 0) return std::nullopt;
  ProclivityCell cell;
  cell.indoor = it->second.first;
  cell.n = it->second.second;
  cell.p = static_cast<double>(cell.indoor) / static_cast<double>(cell.n);
  cell.half_width = WaldHalfWidth(cell.p, cell.n);
  return cell;
}

// Accumulates proclivity counts for the predictions accepted by `keep`.
template <typename Keep>
ProclivityReport Proclivity(const std::vector<GroundingPrediction> &predictions,
                            const PlaceLexicon &lexicon,
                            const std::map<CharacterKey, Gender> &genders, Keep keep) {
  ProclivityReport report;
  std::map<Gender, std::pair<size_t, size_t>> counts;
  for (const GroundingPrediction &p : predictions) {
    if (!keep(p)) continue;
    if (p.label != SpatialRel::kIn) {
      ++report.dropped_not_in;
      continue;
    }
    auto place = lexicon.find(NormalizePlaceForm(p.place_form));
    if (place == lexicon.end()) {
      ++report.dropped_unlisted_place;
      continue;
    }
    auto g = genders.find({p.doc_id, p.character_id});
    if (g == genders.end() || g->second == Gender::kOtherUnknown) {
      ++report.dropped_gender;
      continue;
    }
    AddObservation(counts, g->second, place->second == PlaceClass::kIndoor);
  }
  report.he = MakeCell(counts, Gender::kHe);
  report.she = MakeCell(counts, Gender::kShe);
  return report;
}

json CellJson(const std::optional<ProclivityCell> &cell) {
  if (!cell) return nullptr;
  return {{"p", cell->p},
          {"half_width", cell->half_width},
          {"ci_low", cell->p - cell->half_width},
          {"ci_high", cell->p + cell->half_width},
          {"n", cell->n},
          {"indoor", cell->indoor}};
}

json ProclivityJsonValue(const ProclivityReport &r) {
  return {{"he", CellJson(r.he)},
          {"she", CellJson(r.she)},
          {"dropped_not_in", r.dropped_not_in},
          {"dropped_unlisted_place", r.dropped_unlisted_place},
          {"dropped_gender", r.dropped_gender}};
}

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

json ParseJsonLine(const std::string &line, size_t line_no) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) throw ParseError("line " + std::to_string(line_no) + ": expected object");
    return j;
  } catch (const json::parse_error &e) {
    throw ParseError("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
  }
}

template <typename T>
T Field(const json &j, const char *key, size_t line_no) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError("line " + std::to_string(line_no) + ": field '" + key + "': missing");
  }
  try {
    return it->get<T>();
  } catch (const json::exception &) {
    throw ParseError("line " + std::to_string(line_no) + ": field '" + key +
                     "': wrong type");
  }
}

}  // namespace

std::string GroundingPrediction::PlaceKey() const {
  if (place_entity_id && !place_entity_id->empty()) return "entity:" + *place_entity_id;
  return "form:" + NormalizePlaceForm(place_form);
}

std::string_view GenderName(Gender g) {
  switch (g) {
    case Gender::kHe: return "HE";
    case Gender::kShe: return "SHE";
    case Gender::kOtherUnknown: return "OTHER_UNKNOWN";
  }
  return "?";
}

std::optional<Gender> ParseGender(std::string_view s) {
  if (s == "HE") return Gender::kHe;
  if (s == "SHE") return Gender::kShe;
  if (s == "OTHER_UNKNOWN") return Gender::kOtherUnknown;
  return std::nullopt;
}

std::string NormalizePlaceForm(std::string_view form) {
  std::string out;
  bool pending_space = false;
  for (char c : form) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

int Mobility(const std::vector<GroundingPrediction> &predictions, size_t sample_size,
             Rng &rng) {
  if (sample_size == 0) throw InvalidArgument("sample_size must be positive");
  if (predictions.size() < sample_size) {
    throw InvalidArgument("mobility needs " + std::to_string(sample_size) +
                          " IN predictions, got " + std::to_string(predictions.size()));
  }
  std::set<std::string> places;
  for (size_t i : rng.SampleWithoutReplacement(predictions.size(), sample_size)) {
    places.insert(predictions[i].PlaceKey());
  }
  return static_cast<int>(places.size());
}

MobilityReport ProtagonistMobilityExperiment(
    const std::vector<GroundingPrediction> &predictions,
    const std::vector<CharacterProfile> &profiles, const MobilityParams &params) {
  return RunMobility(RankBooks(profiles, params.rival_pool),
                     GroupInPredictions(predictions), params);
}

std::map<Gender, MobilityReport> GenderStratifiedMobility(
    const std::vector<GroundingPrediction> &predictions,
    const std::vector<CharacterProfile> &profiles, const MobilityParams &params) {
  const std::vector<Book> books = RankBooks(profiles, params.rival_pool);
  const auto groups = GroupInPredictions(predictions);
  std::map<Gender, MobilityReport> reports;
  for (Gender g : {Gender::kHe, Gender::kShe}) {
    std::vector<Book> subset;
    for (const Book &b : books) {
      if (b.protagonist_gender == g) subset.push_back(b);
    }
    if (subset.empty()) continue;
    try {
      reports.emplace(g, RunMobility(subset, groups, params));
    } catch (const InvalidArgument &) {
      // No eligible book for this gender.
    }
  }
  return reports;
}

double WaldHalfWidth(double p, size_t n, double z) {
  if (n == 0) throw InvalidArgument("Wald interval needs n > 0");
  if (p < 0.0 || p > 1.0) throw InvalidArgument("proportion outside [0, 1]");
  return z * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

ProclivityReport IndoorProclivity(const std::vector<GroundingPrediction> &predictions,
                                  const PlaceLexicon &lexicon,
                                  const std::vector<CharacterProfile> &profiles) {
  return Proclivity(predictions, lexicon, GenderIndex(profiles),
                    [](const GroundingPrediction &) { return true; });
}

std::optional<int> TemporalBucket(int year) {
  if (year < 1873) return 0;
  if (year < 1923) return 1;
  if (year < 1973) return 2;
  if (year <= 2020) return 3;
  return std::nullopt;
}

TemporalSliceReport TemporalSliceProclivity(
    const std::vector<GroundingPrediction> &predictions, const PlaceLexicon &lexicon,
    const std::vector<CharacterProfile> &profiles,
    const std::map<std::string, std::optional<int>> &doc_years) {
  TemporalSliceReport report;
  std::map<std::string, int> bucket_of;
  for (const auto &[doc, year] : doc_years) {
    if (!year) {
      ++report.docs_without_year;
      continue;
    }
    auto bucket = TemporalBucket(*year);
    if (!bucket) {
      ++report.docs_out_of_range;
      continue;
    }
    bucket_of[doc] = *bucket;
  }
  const auto genders = GenderIndex(profiles);
  for (int b = 0; b < 4; ++b) {
    report.buckets[static_cast<size_t>(b)] =
        Proclivity(predictions, lexicon, genders, [&](const GroundingPrediction &p) {
          auto it = bucket_of.find(p.doc_id);
          return it != bucket_of.end() && it->second == b;
        });
  }
  return report;
}

std::vector<PlaceFrequency> BuildPlaceLexicon(
    const std::vector<GroundingPrediction> &predictions, size_t top_k) {
  std::map<std::string, size_t> counts;
  for (const GroundingPrediction &p : predictions) {
    if (p.label == SpatialRel::kIn) ++counts[NormalizePlaceForm(p.place_form)];
  }
  std::vector<PlaceFrequency> places;
  for (const auto &[form, count] : counts) {
    if (!form.empty()) places.push_back({form, count});
  }
  std::stable_sort(places.begin(), places.end(),
                   [](const PlaceFrequency &a, const PlaceFrequency &b) {
                     return a.count > b.count;
                   });
  if (places.size() > top_k) places.resize(top_k);
  return places;
}

std::string LexiconSkeletonTsv(const std::vector<PlaceFrequency> &places) {
  std::string out = "place_form\tlabel\n";
  for (const PlaceFrequency &p : places) out += p.place_form + "\t\n";
  return out;
}

PlaceLexicon ParseLexicon(std::string_view text) {
  std::vector<std::string> lines = SplitLines(text);
  if (lines.empty() || lines[0] != "place_form\tlabel") {
    throw ParseError("line 1: expected header 'place_form\\tlabel'");
  }
  PlaceLexicon lexicon;
  std::set<std::string> seen;
  for (size_t i = 1; i < lines.size(); ++i) {
    const std::string where = "line " + std::to_string(i + 1);
    if (lines[i].empty()) continue;
    auto fields = SplitTabs(lines[i]);
    if (fields.size() != 2) throw ParseError(where + ": expected 2 tab-separated fields");
    std::string form = NormalizePlaceForm(fields[0]);
    if (form.empty()) throw ParseError(where + ": field 'place_form': empty");
    if (!seen.insert(form).second) {
      throw ParseError(where + ": field 'place_form': duplicate form '" + form + "'");
    }
    if (fields[1] == "INDOOR") {
      lexicon[form] = PlaceClass::kIndoor;
    } else if (fields[1] == "OUTDOOR") {
      lexicon[form] = PlaceClass::kOutdoor;
    } else if (!fields[1].empty()) {
      throw ParseError(where + ": field 'label': expected INDOOR or OUTDOOR");
    }
  }
  return lexicon;
}

PlaceLexicon LoadLexicon(const std::string &path) { return ParseLexicon(ReadFile(path)); }

std::string SerializePredictions(const std::vector<GroundingPrediction> &predictions) {
  std::string out;
  for (const GroundingPrediction &p : predictions) {
    json j;
    j["pair_id"] = p.pair_id;
    j["doc_id"] = p.doc_id;
    j["character_id"] = p.character_id;
    j["place_mention_id"] = p.place_mention_id;
    j["place_form"] = p.place_form;
    j["place_entity_id"] = p.place_entity_id ? json(*p.place_entity_id) : json(nullptr);
    j["label"] = std::string(SpatialRelName(p.label));
    j["probability"] = p.probability;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<GroundingPrediction> ParsePredictions(std::string_view text) {
  std::vector<GroundingPrediction> predictions;
  std::vector<std::string> lines = SplitLines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    if (lines[i].find_first_not_of(" \t") == std::string::npos) continue;
    json j = ParseJsonLine(lines[i], line_no);
    if (auto task = j.find("task"); task != j.end() && *task != "spatial") {
      throw ParseError("line " + std::to_string(line_no) +
                       ": field 'task': analysis needs spatial predictions");
    }
    GroundingPrediction p;
    p.pair_id = Field<std::string>(j, "pair_id", line_no);
    p.doc_id = Field<std::string>(j, "doc_id", line_no);
    p.character_id = Field<std::string>(j, "character_id", line_no);
    p.place_mention_id = Field<std::string>(j, "place_mention_id", line_no);
    p.place_form = NormalizePlaceForm(Field<std::string>(j, "place_form", line_no));
    if (auto it = j.find("place_entity_id"); it != j.end() && !it->is_null()) {
      p.place_entity_id = Field<std::string>(j, "place_entity_id", line_no);
    }
    std::string label = Field<std::string>(j, "label", line_no);
    auto rel = ParseSpatialRel(label);
    if (!rel) {
      throw ParseError("line " + std::to_string(line_no) + ": field 'label': unknown label '" +
                       label + "'");
    }
    p.label = *rel;
    p.probability = Field<double>(j, "probability", line_no);
    predictions.push_back(std::move(p));
  }
  return predictions;
}

std::vector<GroundingPrediction> LoadPredictions(const std::string &path) {
  return ParsePredictions(ReadFile(path));
}

std::vector<CharacterProfile> ParseProfiles(std::string_view text) {
  std::vector<CharacterProfile> profiles;
  std::vector<std::string> lines = SplitLines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    if (lines[i].find_first_not_of(" \t") == std::string::npos) continue;
    json j = ParseJsonLine(lines[i], line_no);
    CharacterProfile p;
    p.doc_id = Field<std::string>(j, "doc_id", line_no);
    p.entity_id = Field<std::string>(j, "entity_id", line_no);
    p.mention_count = Field<int64_t>(j, "mention_count", line_no);
    if (p.mention_count < 1) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": field 'mention_count': must be >= 1");
    }
    std::string gender = Field<std::string>(j, "gender", line_no);
    auto g = ParseGender(gender);
    if (!g) {
      throw ParseError("line " + std::to_string(line_no) + ": field 'gender': unknown '" +
                       gender + "'");
    }
    p.gender = *g;
    profiles.push_back(std::move(p));
  }
  return profiles;
}

std::vector<CharacterProfile> LoadProfiles(const std::string &path) {
  return ParseProfiles(ReadFile(path));
}

std::string MobilityReportJson(const MobilityReport &r) {
  json j;
  j["mean_relative_difference"] = r.mean_relative_difference;
  j["std_relative_difference"] = r.std_relative_difference;
  j["mean_percent"] = r.mean_relative_difference * 100.0;
  j["std_percent"] = r.std_relative_difference * 100.0;
  j["repeats"] = r.repeats;
  j["repeats_dropped"] = r.repeats_dropped;
  j["sample_size"] = r.sample_size;
  j["books_total"] = r.books_total;
  j["books_used"] = r.books_used;
  j["books_skipped"] = r.books_skipped;
  j["per_repeat"] = r.per_repeat;
  return j.dump(2) + "\n";
}

std::string ProclivityReportJson(const ProclivityReport &report) {
  return ProclivityJsonValue(report).dump(2) + "\n";
}

std::string TemporalSliceReportJson(const TemporalSliceReport &report) {
  json j;
  json buckets = json::array();
  for (size_t b = 0; b < report.buckets.size(); ++b) {
    json bj = ProclivityJsonValue(report.buckets[b]);
    bj["bucket"] = std::string(kTemporalBuckets[b]);
    buckets.push_back(std::move(bj));
  }
  j["buckets"] = std::move(buckets);
  j["docs_without_year"] = report.docs_without_year;
  j["docs_out_of_range"] = report.docs_out_of_range;
  return j.dump(2) + "\n";
}

std::string ProclivityCsv(const ProclivityReport &report, std::string_view bucket) {
  std::string out;
  auto row = [&](std::string_view gender, const std::optional<ProclivityCell> &cell) {
    if (!cell) return;
    out += std::string(bucket) + "," + std::string(gender) + "," + Num(cell->p) + "," +
           Num(cell->p - cell->half_width) + "," + Num(cell->p + cell->half_width) + "," +
           std::to_string(cell->n) + "\n";
  };
  row("HE", report.he);
  row("SHE", report.she);
  return out;
}

std::string TemporalSliceCsv(const TemporalSliceReport &report) {
  std::string out = "bucket,gender,p,ci_low,ci_high,n\n";
  for (size_t b = 0; b < report.buckets.size(); ++b) {
    out += ProclivityCsv(report.buckets[b], kTemporalBuckets[b]);
  }
  return out;
}

}  // namespace grounding
