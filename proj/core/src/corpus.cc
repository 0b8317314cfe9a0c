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
#include <tuple>
#include <unordered_set>

#include "json.hpp"

#include "grounding/error.h"
#include "grounding/io.h"

namespace grounding {

using nlohmann::json;

namespace {

bool MentionLess(const EntityMention &a, const EntityMention &b) {
  return std::tie(a.start, a.end, a.mention_id) <
         std::tie(b.start, b.end, b.mention_id);
}

[[noreturn]] void FieldError(size_t line, const std::string &field,
                             const std::string &what) {
  throw ParseError("line " + std::to_string(line) + ": field '" + field +
                   "': " + what);
}

const json &Require(const json &obj, const char *key, size_t line,
                    const std::string &prefix = "") {
  auto it = obj.find(key);
  if (it == obj.end()) FieldError(line, prefix + key, "missing");
  return *it;
}

std::string RequireString(const json &obj, const char *key, size_t line,
                          const std::string &prefix = "") {
  const json &v = Require(obj, key, line, prefix);
  if (!v.is_string()) FieldError(line, prefix + key, "expected string");
  return v.get<std::string>();
}

int64_t RequireInt(const json &obj, const char *key, size_t line,
                   const std::string &prefix = "") {
  const json &v = Require(obj, key, line, prefix);
  if (!v.is_number_integer()) FieldError(line, prefix + key, "expected integer");
  return v.get<int64_t>();
}

std::optional<std::string> OptionalString(const json &obj, const char *key,
                                          size_t line,
                                          const std::string &prefix = "") {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) FieldError(line, prefix + key, "expected string or null");
  return it->get<std::string>();
}

EntityMention ParseMention(const json &m, size_t line,
                           const std::string &prefix) {
  if (!m.is_object()) FieldError(line, prefix, "expected object");
  EntityMention mention;
  mention.mention_id = RequireString(m, "mention_id", line, prefix + ".");
  std::string type = RequireString(m, "entity_type", line, prefix + ".");
  auto parsed = ParseEntityType(type);
  if (!parsed) FieldError(line, prefix + ".entity_type", "unknown type '" + type + "'");
  mention.entity_type = *parsed;
  mention.start = RequireInt(m, "start", line, prefix + ".");
  mention.end = RequireInt(m, "end", line, prefix + ".");
  mention.entity_id = OptionalString(m, "entity_id", line, prefix + ".");
  return mention;
}

json MentionJson(const EntityMention &m, const std::string &text) {
  json j;
  j["mention_id"] = m.mention_id;
  j["entity_type"] = std::string(EntityTypeName(m.entity_type));
  j["start"] = m.start;
  j["end"] = m.end;
  j["entity_id"] = m.entity_id ? json(*m.entity_id) : json(nullptr);
  j["text"] = text;
  return j;
}

json ParseLine(const std::string &line, size_t line_no) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) FieldError(line_no, "<root>", "expected JSON object");
    return j;
  } catch (const json::parse_error &e) {
    throw ParseError("line " + std::to_string(line_no) + ": invalid JSON: " +
                     e.what());
  }
}

}  // namespace

std::string_view EntityTypeName(EntityType type) {
  switch (type) {
    case EntityType::kPer: return "PER";
    case EntityType::kLoc: return "LOC";
    case EntityType::kFac: return "FAC";
    case EntityType::kGpe: return "GPE";
  }
  return "?";
}

std::optional<EntityType> ParseEntityType(std::string_view name) {
  if (name == "PER") return EntityType::kPer;
  if (name == "LOC") return EntityType::kLoc;
  if (name == "FAC") return EntityType::kFac;
  if (name == "GPE") return EntityType::kGpe;
  return std::nullopt;
}

std::string Document::SpanText(int64_t start, int64_t end) const {
  std::string out;
  for (int64_t i = std::max<int64_t>(start, 0);
       i <= end && i < size(); ++i) {
    if (!out.empty()) out += ' ';
    out += tokens[static_cast<size_t>(i)].text;
  }
  return out;
}

std::string MakePairId(std::string_view doc_id, std::string_view character_id,
                       std::string_view place_id) {
  std::string id;
  id.reserve(doc_id.size() + character_id.size() + place_id.size() + 2);
  id.append(doc_id).append(":").append(character_id).append(":").append(place_id);
  return id;
}

int64_t MentionDistance(const EntityMention &character,
                        const EntityMention &place) {
  if (character.end > place.start) return character.end - place.start;
  return place.end - character.start;
}

std::vector<CandidatePair> ExtractCandidatePairs(const Document &doc,
                                                 int64_t max_gap) {
  std::vector<const EntityMention *> characters;
  std::vector<const EntityMention *> places;
  for (const EntityMention &m : doc.mentions) {
    (IsPlaceType(m.entity_type) ? places : characters).push_back(&m);
  }
  auto less = [](const EntityMention *a, const EntityMention *b) {
    return MentionLess(*a, *b);
  };
  std::sort(characters.begin(), characters.end(), less);
  std::sort(places.begin(), places.end(), less);

  std::vector<CandidatePair> pairs;
  for (const EntityMention *c : characters) {
    for (const EntityMention *l : places) {
      int64_t distance = MentionDistance(*c, *l);
      if (distance > max_gap) continue;
      CandidatePair pair;
      pair.pair_id = MakePairId(doc.doc_id, c->mention_id, l->mention_id);
      pair.doc_id = doc.doc_id;
      pair.character = *c;
      pair.place = *l;
      pair.distance = distance;
      pair.character_text = doc.SpanText(c->start, c->end);
      pair.place_text = doc.SpanText(l->start, l->end);
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

TokenRange ContextWindow(const CandidatePair &pair, int64_t doc_length,
                         int64_t width) {
  if (width <= 0) throw InvalidArgument("context width must be positive");
  if (doc_length <= 0) throw InvalidArgument("document is empty");
  int64_t first = std::min(pair.character.start, pair.place.start);
  int64_t last = std::max(pair.character.end, pair.place.end);
  return {std::max<int64_t>(0, first - width),
          std::min<int64_t>(doc_length - 1, last + width)};
}

void ValidateDocument(const Document &doc) {
  const std::string where = "document '" + doc.doc_id + "'";
  if (doc.doc_id.empty()) throw InvalidArgument("document with empty doc_id");
  for (size_t i = 0; i < doc.tokens.size(); ++i) {
    if (doc.tokens[i].index != static_cast<int64_t>(i)) {
      throw InvalidArgument(where + ": token indices are not contiguous at " +
                            std::to_string(i));
    }
    if (doc.tokens[i].text.empty()) {
      throw InvalidArgument(where + ": token " + std::to_string(i) + " is empty");
    }
  }
  std::unordered_set<std::string> ids;
  for (const EntityMention &m : doc.mentions) {
    if (!ids.insert(m.mention_id).second) {
      throw InvalidArgument(where + ": duplicate mention_id '" + m.mention_id + "'");
    }
    if (m.start < 0 || m.start > m.end || m.end >= doc.size()) {
      throw InvalidArgument(where + ": mention '" + m.mention_id +
                            "' span [" + std::to_string(m.start) + "," +
                            std::to_string(m.end) + "] outside token range");
    }
  }
}

std::vector<Document> ParseCorpus(std::string_view text) {
  std::vector<Document> docs;
  std::unordered_set<std::string> doc_ids;
  std::vector<std::string> lines = SplitLines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    if (lines[i].find_first_not_of(" \t") == std::string::npos) continue;
    json j = ParseLine(lines[i], line_no);

    Document doc;
    doc.doc_id = RequireString(j, "doc_id", line_no);
    if (doc.doc_id.empty()) FieldError(line_no, "doc_id", "empty");
    if (auto it = j.find("year"); it != j.end() && !it->is_null()) {
      if (!it->is_number_integer()) FieldError(line_no, "year", "expected integer or null");
      doc.year = it->get<int>();
    }
    const json &tokens = Require(j, "tokens", line_no);
    if (!tokens.is_array()) FieldError(line_no, "tokens", "expected array");
    for (size_t t = 0; t < tokens.size(); ++t) {
      const std::string field = "tokens[" + std::to_string(t) + "]";
      if (!tokens[t].is_string()) FieldError(line_no, field, "expected string");
      std::string token = tokens[t].get<std::string>();
      if (token.empty()) FieldError(line_no, field, "empty token");
      doc.tokens.push_back({static_cast<int64_t>(t), std::move(token)});
    }
    const json &mentions = Require(j, "mentions", line_no);
    if (!mentions.is_array()) FieldError(line_no, "mentions", "expected array");
    std::unordered_set<std::string> mention_ids;
    for (size_t m = 0; m < mentions.size(); ++m) {
      const std::string field = "mentions[" + std::to_string(m) + "]";
      EntityMention mention = ParseMention(mentions[m], line_no, field);
      if (!mention_ids.insert(mention.mention_id).second) {
        FieldError(line_no, field + ".mention_id",
                   "duplicate mention_id '" + mention.mention_id + "'");
      }
      if (mention.start < 0 || mention.start > mention.end ||
          mention.end >= doc.size()) {
        FieldError(line_no, field, "span [" + std::to_string(mention.start) +
                                       "," + std::to_string(mention.end) +
                                       "] outside token range");
      }
      doc.mentions.push_back(std::move(mention));
    }
    if (!doc_ids.insert(doc.doc_id).second) {
      FieldError(line_no, "doc_id", "duplicate doc_id '" + doc.doc_id + "'");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> LoadCorpus(const std::string &path) {
  return ParseCorpus(ReadFile(path));
}

std::string SerializeDocument(const Document &doc) {
  json j;
  j["doc_id"] = doc.doc_id;
  j["year"] = doc.year ? json(*doc.year) : json(nullptr);
  json tokens = json::array();
  for (const Token &t : doc.tokens) tokens.push_back(t.text);
  j["tokens"] = std::move(tokens);
  json mentions = json::array();
  for (const EntityMention &m : doc.mentions) {
    json mj;
    mj["mention_id"] = m.mention_id;
    mj["entity_type"] = std::string(EntityTypeName(m.entity_type));
    mj["start"] = m.start;
    mj["end"] = m.end;
    mj["entity_id"] = m.entity_id ? json(*m.entity_id) : json(nullptr);
    mentions.push_back(std::move(mj));
  }
  j["mentions"] = std::move(mentions);
  return j.dump();
}

std::string SerializePairs(const std::vector<CandidatePair> &pairs) {
  std::string out;
  for (const CandidatePair &p : pairs) {
    json j;
    j["pair_id"] = p.pair_id;
    j["doc_id"] = p.doc_id;
    j["distance"] = p.distance;
    j["character"] = MentionJson(p.character, p.character_text);
    j["place"] = MentionJson(p.place, p.place_text);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<CandidatePair> ParsePairs(std::string_view text) {
  std::vector<CandidatePair> pairs;
  std::unordered_set<std::string> ids;
  std::vector<std::string> lines = SplitLines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    if (lines[i].find_first_not_of(" \t") == std::string::npos) continue;
    json j = ParseLine(lines[i], line_no);
    CandidatePair p;
    p.pair_id = RequireString(j, "pair_id", line_no);
    p.doc_id = RequireString(j, "doc_id", line_no);
    p.distance = RequireInt(j, "distance", line_no);
    const json &c = Require(j, "character", line_no);
    const json &l = Require(j, "place", line_no);
    p.character = ParseMention(c, line_no, "character");
    p.place = ParseMention(l, line_no, "place");
    p.character_text = OptionalString(c, "text", line_no, "character.").value_or("");
    p.place_text = OptionalString(l, "text", line_no, "place.").value_or("");
    if (p.character.entity_type != EntityType::kPer) {
      FieldError(line_no, "character.entity_type", "character must be PER");
    }
    if (!IsPlaceType(p.place.entity_type)) {
      FieldError(line_no, "place.entity_type", "place must be LOC, FAC or GPE");
    }
    if (!ids.insert(p.pair_id).second) {
      FieldError(line_no, "pair_id", "duplicate pair_id '" + p.pair_id + "'");
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::vector<CandidatePair> LoadPairs(const std::string &path) {
  return ParsePairs(ReadFile(path));
}

}  // namespace grounding
