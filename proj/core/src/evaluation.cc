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

#include "grounding/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"

#include "grounding/error.h"

namespace grounding {

using nlohmann::json;

namespace {

std::string Fixed(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

}  // namespace

double Accuracy(const std::vector<int> &preds, const std::vector<int> &golds) {
  if (preds.size() != golds.size()) {
    throw InvalidArgument("predictions and golds differ in length: " +
                          std::to_string(preds.size()) + " vs " +
                          std::to_string(golds.size()));
  }
  if (golds.empty()) throw InvalidArgument("accuracy of an empty set");
  size_t correct = 0;
  for (size_t i = 0; i < golds.size(); ++i) correct += preds[i] == golds[i];
  return static_cast<double>(correct) / static_cast<double>(golds.size());
}

EvalReport PerClassPrf(const std::vector<int> &preds, const std::vector<int> &golds,
                       Task task) {
  const auto &labels = TaskLabels(task);
  const int k = static_cast<int>(labels.size());
  for (const auto *column : {&preds, &golds}) {
    for (int v : *column) {
      if (v < 0 || v >= k) {
        throw InvalidArgument("label index " + std::to_string(v) +
                              " outside the " + std::string(TaskName(task)) +
                              " vocabulary");
      }
    }
  }
  EvalReport report;
  report.task = task;
  report.accuracy = Accuracy(preds, golds);
  report.n_examples = golds.size();
  std::vector<size_t> tp(labels.size(), 0), fp(labels.size(), 0), fn(labels.size(), 0);
  for (size_t i = 0; i < golds.size(); ++i) {
    const auto p = static_cast<size_t>(preds[i]);
    const auto g = static_cast<size_t>(golds[i]);
    if (p == g) {
      ++tp[g];
    } else {
      ++fp[p];
      ++fn[g];
    }
  }
  for (size_t c = 0; c < labels.size(); ++c) {
    ClassMetrics m;
    m.label = labels[c];
    m.support = tp[c] + fn[c];
    if (tp[c] + fp[c] > 0) {
      m.precision = static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fp[c]);
    } else {
      m.zero_division = true;
    }
    if (m.support > 0) {
      m.recall = static_cast<double>(tp[c]) / static_cast<double>(m.support);
    } else {
      m.zero_division = true;
    }
    if (m.precision + m.recall > 0) {
      m.f1 = 2 * m.precision * m.recall / (m.precision + m.recall);
    } else {
      m.zero_division = true;
    }
    report.per_class.push_back(m);
  }
  return report;
}

std::vector<int> LabelIndices(Task task, const std::vector<std::string> &labels) {
  std::vector<int> out;
  out.reserve(labels.size());
  for (const std::string &l : labels) {
    auto index = LabelIndex(task, l);
    if (!index) {
      throw InvalidArgument("label '" + l + "' is not in the " +
                            std::string(TaskName(task)) + " vocabulary");
    }
    out.push_back(*index);
  }
  return out;
}

const std::vector<int> &TieBreakOrder(Task task) {
  // Spatial: IN, NO_REL, NEAR, TO, FROM, THRU by released annotation counts.
  static const std::vector<int> kSpatial = {0, 5, 1, 3, 4, 2};
  static const std::vector<int> kBinary = {0, 1};
  return task == Task::kSpatial ? kSpatial : kBinary;
}

MajorityBaseline FitMajorityBaseline(const std::vector<int> &train_golds, Task task) {
  if (train_golds.empty()) throw InvalidArgument("majority baseline needs training labels");
  const size_t k = TaskLabels(task).size();
  std::vector<size_t> counts(k, 0);
  for (int g : train_golds) {
    if (g < 0 || static_cast<size_t>(g) >= k) throw InvalidArgument("label out of range");
    ++counts[static_cast<size_t>(g)];
  }
  int best = -1;
  for (int label : TieBreakOrder(task)) {
    if (best < 0 || counts[static_cast<size_t>(label)] > counts[static_cast<size_t>(best)]) {
      best = label;
    }
  }
  return {task, best};
}

std::vector<CurvePoint> LearningCurve(const Dataset &data, const Split &split,
                                      const TrainConfig &config,
                                      const std::vector<double> &fractions,
                                      int repeats, uint64_t seed) {
  if (repeats < 1) throw InvalidArgument("repeats must be positive");
  if (split.test.empty()) throw InvalidArgument("learning curve needs a test split");
  std::vector<CurvePoint> curve;
  for (size_t f = 0; f < fractions.size(); ++f) {
    const double fraction = fractions[f];
    if (!(fraction > 0.0 && fraction <= 1.0)) {
      throw InvalidArgument("curve fractions must lie in (0, 1]");
    }
    CurvePoint point;
    point.fraction = fraction;
    point.train_size = std::max<size_t>(
        1, static_cast<size_t>(std::llround(fraction * static_cast<double>(split.train.size()))));
    for (int r = 0; r < repeats; ++r) {
      Rng rng(DeriveSeed(seed, "curve", f * 1000003ULL + static_cast<uint64_t>(r)));
      Split sub;
      for (size_t i : rng.SampleWithoutReplacement(split.train.size(), point.train_size)) {
        sub.train.push_back(split.train[i]);
      }
      sub.dev = split.dev;
      sub.test = split.test;
      TrainConfig run_config = config;
      run_config.rng_seed = DeriveSeed(config.rng_seed, "curve-init",
                                       static_cast<uint64_t>(r));
      TrainedModel model = Train(data, sub, run_config).model;
      point.accuracies.push_back(ModelAccuracy(model, data, split.test));
    }
    double sum = 0.0;
    for (double a : point.accuracies) sum += a;
    point.mean_accuracy = sum / static_cast<double>(repeats);
    if (repeats > 1) {
      double sq = 0.0;
      for (double a : point.accuracies) sq += (a - point.mean_accuracy) * (a - point.mean_accuracy);
      point.std_accuracy = std::sqrt(sq / static_cast<double>(repeats - 1));
    }
    curve.push_back(std::move(point));
  }
  return curve;
}

std::string EvalReportJson(const EvalReport &report) {
  json j;
  j["task"] = std::string(TaskName(report.task));
  j["accuracy"] = report.accuracy;
  j["n_examples"] = report.n_examples;
  json classes = json::array();
  for (const ClassMetrics &m : report.per_class) {
    classes.push_back({{"label", m.label},
                       {"precision", m.precision},
                       {"recall", m.recall},
                       {"f1", m.f1},
                       {"support", m.support},
                       {"zero_division", m.zero_division}});
  }
  j["per_class"] = std::move(classes);
  return j.dump(2) + "\n";
}

std::string EvalReportTable(const EvalReport &report) {
  char line[160];
  std::string out;
  std::snprintf(line, sizeof(line), "task: %s  accuracy: %s  n: %zu\n",
                std::string(TaskName(report.task)).c_str(),
                Fixed(report.accuracy).c_str(), report.n_examples);
  out += line;
  std::snprintf(line, sizeof(line), "%-18s %9s %9s %9s %9s\n", "label", "precision",
                "recall", "f1", "support");
  out += line;
  for (const ClassMetrics &m : report.per_class) {
    std::snprintf(line, sizeof(line), "%-18s %9s %9s %9s %9zu%s\n", m.label.c_str(),
                  Fixed(m.precision).c_str(), Fixed(m.recall).c_str(),
                  Fixed(m.f1).c_str(), m.support, m.zero_division ? "  *" : "");
    out += line;
  }
  return out;
}

std::string LearningCurveCsv(const std::vector<CurvePoint> &curve) {
  std::string out = "fraction,train_size,mean_acc,std\n";
  for (const CurvePoint &p : curve) {
    out += Fixed(p.fraction, 4) + "," + std::to_string(p.train_size) + "," +
           Fixed(p.mean_accuracy, 6) + "," + Fixed(p.std_accuracy, 6) + "\n";
  }
  return out;
}

}  // namespace grounding
