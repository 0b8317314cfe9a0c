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

#ifndef GROUNDING_ANNOTATION_H_
#define GROUNDING_ANNOTATION_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace grounding {

enum class Validity { kValid, kInvalid };
enum class SpatialRel { kIn, kNear, kThru, kTo, kFrom, kNoRel };
enum class TemporalSpan { kPunctual, kHabitual };
enum class NarrativeTense { kOngoing, kAlreadyHappened };

// The four labelling tasks. Each has its own closed label vocabulary.
enum class Task { kValidity, kSpatial, kTemporal, kTense };

std::string_view TaskName(Task task);
std::optional<Task> ParseTask(std::string_view name);

// Label names in enum order, e.g. {"IN","NEAR","THRU","TO","FROM","NO_REL"}.
const std::vector<std::string> &TaskLabels(Task task);
// Index of `label` in TaskLabels(task), or nullopt.
std::optional<int> LabelIndex(Task task, std::string_view label);

std::string_view ValidityName(Validity v);
std::string_view SpatialRelName(SpatialRel r);
std::string_view TemporalSpanName(TemporalSpan t);
std::string_view NarrativeTenseName(NarrativeTense t);
std::optional<Validity> ParseValidity(std::string_view s);
std::optional<SpatialRel> ParseSpatialRel(std::string_view s);
std::optional<TemporalSpan> ParseTemporalSpan(std::string_view s);
std::optional<NarrativeTense> ParseNarrativeTense(std::string_view s);

struct AnnotationRecord {
  std::string pair_id;
  std::string annotator_id;
  Validity validity = Validity::kValid;
  std::optional<SpatialRel> spatial;
  std::optional<TemporalSpan> temporal;
  std::optional<NarrativeTense> tense;
  std::optional<std::string> note;

  // The record's label for `task` as an index into TaskLabels(task), or
  // nullopt when the task does not apply (non-validity tasks on INVALID
  // pairs, or an unlabelled optional task).
  std::optional<int> Label(Task task) const;

  // Same labels on all four tasks (annotator and note ignored).
  bool SameLabels(const AnnotationRecord &other) const;

  bool operator==(const AnnotationRecord &) const = default;
};

// INVALID records carry no other labels; VALID records carry a spatial label.
void ValidateRecord(const AnnotationRecord &record);

struct KappaResult {
  double kappa = 0.0;
  double observed = 0.0;  // p_o
  double expected = 0.0;  // p_e
  size_t n = 0;
  // confusion[i][j] = items labelled i by the first annotator, j by the second.
  std::vector<std::vector<size_t>> confusion;
};

// Cohen's kappa between two annotators over the pair_ids they share. For the
// non-validity tasks only pairs both annotators marked VALID (and labelled)
// are compared. Throws InvalidArgument on an empty comparison set or on
// p_e = 1 with p_o < 1.
KappaResult CohenKappa(const std::vector<AnnotationRecord> &a,
                       const std::vector<AnnotationRecord> &b, Task task);

// Label counts over records where the task applies.
std::map<std::string, size_t> LabelDistribution(
    const std::vector<AnnotationRecord> &records, Task task);

// Collapses per-annotator records into one gold record per pair_id (sorted by
// pair_id). Unanimous labels are kept; otherwise the adjudicator's record
// wins. Gold records carry annotator_id = adjudicator_id. Throws
// InvalidArgument listing every unresolved pair_id.
std::vector<AnnotationRecord> Adjudicate(
    const std::vector<AnnotationRecord> &records,
    const std::string &adjudicator_id);

// Annotation TSV with header
//   pair_id annotator_id validity spatial temporal tense note
// Absent labels are empty strings. Backslash, tab, CR and LF in notes are
// escaped as \\ \t \r \n.
std::string SerializeAnnotations(const std::vector<AnnotationRecord> &records);
std::vector<AnnotationRecord> ParseAnnotations(std::string_view text);
std::vector<AnnotationRecord> LoadAnnotations(const std::string &path);

}  // namespace grounding

#endif  // GROUNDING_ANNOTATION_H_
