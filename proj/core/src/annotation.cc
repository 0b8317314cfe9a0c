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

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "grounding/error.h"
#include "grounding/io.h"

namespace grounding {

namespace {

constexpr char kHeader[] =
    "pair_id\tannotator_id\tvalidity\tspatial\ttemporal\ttense\tnote";

template <typename Enum>
std::optional<Enum> ParseByName(std::string_view s, Task task) {
  auto index = LabelIndex(task, s);
  if (!index) return std::nullopt;
  return static_cast<Enum>(*index);
}

std::string Escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Unescape(std::string_view s, size_t line_no) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out += s[i];
      continue;
    }
    if (++i == s.size()) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": field 'note': dangling escape");
    }
    switch (s[i]) {
      case '\\': out += '\\'; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      default:
        throw ParseError("line " + std::to_string(line_no) +
                         ": field 'note': unknown escape");
    }
  }
  return out;
}

std::map<std::string, const AnnotationRecord *> IndexByPair(
    const std::vector<AnnotationRecord> &records, const char *which) {
  std::map<std::string, const AnnotationRecord *> index;
  for (const AnnotationRecord &r : records) {
    if (!index.emplace(r.pair_id, &r).second) {
      throw InvalidArgument(std::string("annotator ") + which +
                            " has duplicate pair_id '" + r.pair_id + "'");
    }
  }
  return index;
}

}  // namespace

std::string_view TaskName(Task task) {
  switch (task) {
    case Task::kValidity: return "validity";
    case Task::kSpatial: return "spatial";
    case Task::kTemporal: return "temporal";
    case Task::kTense: return "tense";
  }
  return "?";
}

std::optional<Task> ParseTask(std::string_view name) {
  for (Task t : {Task::kValidity, Task::kSpatial, Task::kTemporal, Task::kTense}) {
    if (TaskName(t) == name) return t;
  }
  return std::nullopt;
}

const std::vector<std::string> &TaskLabels(Task task) {
  static const std::vector<std::string> kValidityLabels = {"VALID", "INVALID"};
  static const std::vector<std::string> kSpatialLabels = {
      "IN", "NEAR", "THRU", "TO", "FROM", "NO_REL"};
  static const std::vector<std::string> kTemporalLabels = {"PUNCTUAL", "HABITUAL"};
  static const std::vector<std::string> kTenseLabels = {"ONGOING",
                                                        "ALREADY_HAPPENED"};
  switch (task) {
    case Task::kValidity: return kValidityLabels;
    case Task::kSpatial: return kSpatialLabels;
    case Task::kTemporal: return kTemporalLabels;
    case Task::kTense: return kTenseLabels;
  }
  return kValidityLabels;
}

std::optional<int> LabelIndex(Task task, std::string_view label) {
  const auto &labels = TaskLabels(task);
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::string_view ValidityName(Validity v) {
  return TaskLabels(Task::kValidity)[static_cast<size_t>(v)];
}
std::string_view SpatialRelName(SpatialRel r) {
  return TaskLabels(Task::kSpatial)[static_cast<size_t>(r)];
}
std::string_view TemporalSpanName(TemporalSpan t) {
  return TaskLabels(Task::kTemporal)[static_cast<size_t>(t)];
}
std::string_view NarrativeTenseName(NarrativeTense t) {
  return TaskLabels(Task::kTense)[static_cast<size_t>(t)];
}
std::optional<Validity> ParseValidity(std::string_view s) {
  return ParseByName<Validity>(s, Task::kValidity);
}
std::optional<SpatialRel> ParseSpatialRel(std::string_view s) {
  return ParseByName<SpatialRel>(s, Task::kSpatial);
}
std::optional<TemporalSpan> ParseTemporalSpan(std::string_view s) {
  return ParseByName<TemporalSpan>(s, Task::kTemporal);
}
std::optional<NarrativeTense> ParseNarrativeTense(std::string_view s) {
  return ParseByName<NarrativeTense>(s, Task::kTense);
}

std::optional<int> AnnotationRecord::Label(Task task) const {
  if (task == Task::kValidity) return static_cast<int>(validity);
  if (validity != Validity::kValid) return std::nullopt;
  switch (task) {
    case Task::kSpatial:
      if (spatial) return static_cast<int>(*spatial);
      break;
    case Task::kTemporal:
      if (temporal) return static_cast<int>(*temporal);
      break;
    case Task::kTense:
      if (tense) return static_cast<int>(*tense);
      break;
    case Task::kValidity:
      break;
  }
  return std::nullopt;
}

bool AnnotationRecord::SameLabels(const AnnotationRecord &other) const {
  return validity == other.validity && spatial == other.spatial &&
         temporal == other.temporal && tense == other.tense;
}

void ValidateRecord(const AnnotationRecord &r) {
  if (r.pair_id.empty()) throw InvalidArgument("annotation with empty pair_id");
  if (r.validity == Validity::kInvalid &&
      (r.spatial || r.temporal || r.tense)) {
    throw InvalidArgument("pair '" + r.pair_id +
                          "' is INVALID but carries task labels");
  }
  if (r.validity == Validity::kValid && !r.spatial) {
    throw InvalidArgument("pair '" + r.pair_id +
                          "' is VALID but has no spatial label");
  }
}

KappaResult CohenKappa(const std::vector<AnnotationRecord> &a,
                       const std::vector<AnnotationRecord> &b, Task task) {
  auto index_a = IndexByPair(a, "a");
  auto index_b = IndexByPair(b, "b");
  const size_t k = TaskLabels(task).size();

  KappaResult result;
  result.confusion.assign(k, std::vector<size_t>(k, 0));
  for (const auto &[pair_id, ra] : index_a) {
    auto it = index_b.find(pair_id);
    if (it == index_b.end()) continue;
    auto la = ra->Label(task);
    auto lb = it->second->Label(task);
    if (!la || !lb) continue;
    ++result.confusion[static_cast<size_t>(*la)][static_cast<size_t>(*lb)];
    ++result.n;
  }
  if (result.n == 0) {
    throw InvalidArgument("no shared pairs to compare for task " +
                          std::string(TaskName(task)));
  }

  const double n = static_cast<double>(result.n);
  double agree = 0.0;
  double expected = 0.0;
  for (size_t i = 0; i < k; ++i) {
    agree += static_cast<double>(result.confusion[i][i]);
    double row = 0.0;
    double col = 0.0;
    for (size_t j = 0; j < k; ++j) {
      row += static_cast<double>(result.confusion[i][j]);
      col += static_cast<double>(result.confusion[j][i]);
    }
    expected += (row / n) * (col / n);
  }
  result.observed = agree / n;
  result.expected = expected;
  if (expected >= 1.0) {
    if (result.observed < 1.0) {
      throw InvalidArgument("kappa undefined: chance agreement is 1");
    }
    result.kappa = 1.0;
  } else {
    result.kappa = (result.observed - expected) / (1.0 - expected);
  }
  return result;
}

std::map<std::string, size_t> LabelDistribution(
    const std::vector<AnnotationRecord> &records, Task task) {
  std::map<std::string, size_t> counts;
  const auto &labels = TaskLabels(task);
  for (const AnnotationRecord &r : records) {
    if (auto label = r.Label(task)) ++counts[labels[static_cast<size_t>(*label)]];
  }
  return counts;
}

std::vector<AnnotationRecord> Adjudicate(
    const std::vector<AnnotationRecord> &records,
    const std::string &adjudicator_id) {
  std::map<std::string, std::vector<const AnnotationRecord *>> groups;
  for (const AnnotationRecord &r : records) groups[r.pair_id].push_back(&r);

  std::vector<AnnotationRecord> gold;
  std::vector<std::string> unresolved;
  for (const auto &[pair_id, group] : groups) {
    const bool unanimous =
        std::all_of(group.begin(), group.end(), [&](const AnnotationRecord *r) {
          return r->SameLabels(*group.front());
        });
    const AnnotationRecord *winner = nullptr;
    if (unanimous) {
      winner = group.front();
      for (const AnnotationRecord *r : group) {
        if (r->annotator_id == adjudicator_id) winner = r;
      }
    } else {
      for (const AnnotationRecord *r : group) {
        if (r->annotator_id == adjudicator_id) winner = r;
      }
    }
    if (winner == nullptr) {
      unresolved.push_back(pair_id);
      continue;
    }
    AnnotationRecord out = *winner;
    out.annotator_id = adjudicator_id;
    gold.push_back(std::move(out));
  }
  if (!unresolved.empty()) {
    std::string list;
    for (const std::string &id : unresolved) {
      if (!list.empty()) list += ", ";
      list += id;
    }
    throw InvalidArgument("unresolved disagreements without adjudicator '" +
                          adjudicator_id + "' record: " + list);
  }
  return gold;
}

std::string SerializeAnnotations(const std::vector<AnnotationRecord> &records) {
  std::string out = kHeader;
  out += '\n';
  for (const AnnotationRecord &r : records) {
    out += Escape(r.pair_id);
    out += '\t';
    out += Escape(r.annotator_id);
    out += '\t';
    out += ValidityName(r.validity);
    out += '\t';
    if (r.spatial) out += SpatialRelName(*r.spatial);
    out += '\t';
    if (r.temporal) out += TemporalSpanName(*r.temporal);
    out += '\t';
    if (r.tense) out += NarrativeTenseName(*r.tense);
    out += '\t';
    if (r.note) out += Escape(*r.note);
    out += '\n';
  }
  return out;
}

std::vector<AnnotationRecord> ParseAnnotations(std::string_view text) {
  std::vector<std::string> lines = SplitLines(text);
  if (lines.empty() || lines[0] != kHeader) {
    throw ParseError("line 1: expected header '" + std::string(kHeader) + "'");
  }
  std::vector<AnnotationRecord> records;
  for (size_t i = 1; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    if (lines[i].empty()) continue;
    std::vector<std::string> f = SplitTabs(lines[i]);
    auto fail = [&](const std::string &field, const std::string &what) {
      throw ParseError("line " + std::to_string(line_no) + ": field '" + field +
                       "': " + what);
    };
    if (f.size() != 7) {
      fail("<row>", "expected 7 tab-separated fields, got " + std::to_string(f.size()));
    }
    AnnotationRecord r;
    r.pair_id = Unescape(f[0], line_no);
    r.annotator_id = Unescape(f[1], line_no);
    if (r.pair_id.empty()) fail("pair_id", "empty");
    auto validity = ParseValidity(f[2]);
    if (!validity) fail("validity", "unknown label '" + f[2] + "'");
    r.validity = *validity;
    if (!f[3].empty()) {
      r.spatial = ParseSpatialRel(f[3]);
      if (!r.spatial) fail("spatial", "unknown label '" + f[3] + "'");
    }
    if (!f[4].empty()) {
      r.temporal = ParseTemporalSpan(f[4]);
      if (!r.temporal) fail("temporal", "unknown label '" + f[4] + "'");
    }
    if (!f[5].empty()) {
      r.tense = ParseNarrativeTense(f[5]);
      if (!r.tense) fail("tense", "unknown label '" + f[5] + "'");
    }
    if (!f[6].empty()) r.note = Unescape(f[6], line_no);
    try {
      ValidateRecord(r);
    } catch (const InvalidArgument &e) {
      fail("validity", e.what());
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<AnnotationRecord> LoadAnnotations(const std::string &path) {
  return ParseAnnotations(ReadFile(path));
}

}  // namespace grounding
