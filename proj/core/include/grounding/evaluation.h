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

#ifndef GROUNDING_EVALUATION_H_
#define GROUNDING_EVALUATION_H_

#include <string>
#include <vector>

#include "grounding/annotation.h"
#include "grounding/classifier.h"

namespace grounding {

// Fraction of positions where preds[i] == golds[i].
double Accuracy(const std::vector<int> &preds, const std::vector<int> &golds);

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  size_t support = 0;
  // Set when a zero denominator forced a metric to 0.
  bool zero_division = false;
};

struct EvalReport {
  Task task = Task::kSpatial;
  double accuracy = 0.0;
  std::vector<ClassMetrics> per_class;  // vocabulary order
  size_t n_examples = 0;
};

// Per-class precision, recall and F1 over the task vocabulary. Throws
// InvalidArgument on a label outside it.
EvalReport PerClassPrf(const std::vector<int> &preds, const std::vector<int> &golds,
                       Task task);

// Maps label names to indices, throwing on unknown names.
std::vector<int> LabelIndices(Task task, const std::vector<std::string> &labels);

// Frequency order used to break ties between equally common labels.
const std::vector<int> &TieBreakOrder(Task task);

struct MajorityBaseline {
  Task task = Task::kSpatial;
  int label = 0;

  std::vector<int> PredictAll(size_t n) const { return std::vector<int>(n, label); }
};

// The most frequent training label. Throws on an empty list.
MajorityBaseline FitMajorityBaseline(const std::vector<int> &train_golds, Task task);

struct CurvePoint {
  double fraction = 0.0;
  size_t train_size = 0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // sample standard deviation over repeats
  std::vector<double> accuracies;
};

inline const std::vector<double> kDefaultCurveFractions = {0.1, 0.25, 0.5, 0.75, 1.0};

// For each fraction, `repeats` seeded subsamples of the training split are
// trained and scored on the fixed test split.
std::vector<CurvePoint> LearningCurve(const Dataset &data, const Split &split,
                                      const TrainConfig &config,
                                      const std::vector<double> &fractions,
                                      int repeats, uint64_t seed);

std::string EvalReportJson(const EvalReport &report);
std::string EvalReportTable(const EvalReport &report);
std::string LearningCurveCsv(const std::vector<CurvePoint> &curve);

}  // namespace grounding

#endif  // GROUNDING_EVALUATION_H_
