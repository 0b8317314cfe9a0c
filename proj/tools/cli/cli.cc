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

#include "cli/cli.h"

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cli/run_config.h"
#include "grounding/analysis.h"
#include "grounding/annotation.h"
#include "grounding/classifier.h"
#include "grounding/corpus.h"
#include "grounding/embeddings.h"
#include "grounding/error.h"
#include "grounding/evaluation.h"
#include "grounding/io.h"

namespace grounding::cli {

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

// Options shared by every subcommand.
struct CommonOptions {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string out_dir;
  std::vector<std::string> overrides;  // key=value
  bool json_output = false;
};

struct Context {
  RunConfig config;
  bool json_output = false;
  std::ostream &out;
};

std::string Fixed(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

const std::string &Require(const std::string &value, const char *what) {
  if (value.empty()) {
    throw InvalidArgument(std::string("missing ") + what +
                          " (pass the flag or set it in --config)");
  }
  return value;
}

Task RequireTask(const std::string &name) {
  auto task = ParseTask(name);
  if (!task) {
    throw InvalidArgument("unknown task '" + name +
                          "' (expected validity, spatial, temporal or tense)");
  }
  return *task;
}

// Report envelope: every JSON output records the seed and config hash.
json Envelope(const Context &ctx, const std::string &command) {
  json j;
  j["command"] = command;
  j["seed"] = ctx.config.seed;
  j["config_hash"] = ctx.config.Hash();
  return j;
}

void WriteJson(const std::string &path, const json &j) {
  WriteFileAtomic(path, j.dump(2) + "\n");
}

std::string ReportPath(const Context &ctx, const std::string &name) {
  return (fs::path(ctx.config.report_dir) / name).string();
}

std::string ModelPath(const Context &ctx, Task task) {
  return (fs::path(ctx.config.model_dir) / (std::string(TaskName(task)) + ".model.json"))
      .string();
}

// Emits either the text summary or the JSON report on stdout.
void Emit(const Context &ctx, const std::string &text, const json &report) {
  if (ctx.json_output) {
    ctx.out << report.dump(2) << "\n";
  } else {
    ctx.out << text;
  }
}

std::vector<AnnotationRecord> LoadGold(const std::string &path) {
  std::vector<AnnotationRecord> records = LoadAnnotations(path);
  std::map<std::string, int> seen;
  for (const AnnotationRecord &r : records) {
    if (++seen[r.pair_id] > 1) {
      throw InvalidArgument("annotations in " + path + " repeat pair '" + r.pair_id +
                            "'; run `adjudicate` to produce a gold file");
    }
  }
  return records;
}

Dataset LoadDataset(const Context &ctx, Task task, int64_t width) {
  const RunConfig &c = ctx.config;
  auto it = c.embeddings.find(width);
  if (it == c.embeddings.end()) {
    throw InvalidArgument("no embeddings configured for context width " +
                          std::to_string(width) + " (set embeddings." +
                          std::to_string(width) + ")");
  }
  std::vector<AnnotationRecord> gold = LoadGold(Require(c.annotations, "annotations"));
  std::vector<CandidatePair> pairs = LoadPairs(Require(c.pairs, "pairs"));
  EmbeddingTable table = LoadEmbeddings(it->second);
  Dataset data = BuildDataset(task, gold, pairs, table);
  if (data.size() == 0) {
    throw InvalidArgument("no annotated examples for task " + std::string(TaskName(task)));
  }
  return data;
}

json EvalJson(const EvalReport &report) { return json::parse(EvalReportJson(report)); }

json DatasetSummary(const Dataset &data, const Split &split) {
  return {{"examples", data.size()},
          {"train", split.train.size()},
          {"dev", split.dev.size()},
          {"test", split.test.size()}};
}

std::vector<int> GoldsOf(const Dataset &data, const std::vector<size_t> &indices) {
  std::vector<int> out;
  for (size_t i : indices) out.push_back(data.labels[i]);
  return out;
}

std::vector<int> PredictionsOf(const TrainedModel &model, const Dataset &data,
                               const std::vector<size_t> &indices) {
  std::vector<int> out;
  for (size_t i : indices) out.push_back(Predict(model, data.features[i]).label);
  return out;
}

// Test-split report for a model plus the majority baseline fitted on train.
json TestEvaluation(const TrainedModel &model, const Dataset &data, const Split &split,
                    std::string &text) {
  json j;
  if (split.test.empty()) {
    text += "test split is empty\n";
    return j;
  }
  const std::vector<int> golds = GoldsOf(data, split.test);
  EvalReport report = PerClassPrf(PredictionsOf(model, data, split.test), golds, data.task);
  MajorityBaseline baseline = FitMajorityBaseline(GoldsOf(data, split.train), data.task);
  const double baseline_acc = Accuracy(baseline.PredictAll(golds.size()), golds);
  j["test"] = EvalJson(report);
  j["majority_baseline"] = {
      {"label", TaskLabels(data.task)[static_cast<size_t>(baseline.label)]},
      {"test_accuracy", baseline_acc}};
  text += EvalReportTable(report);
  text += "majority baseline (" + TaskLabels(data.task)[static_cast<size_t>(baseline.label)] +
          "): " + Fixed(baseline_acc, 4) + "\n";
  return j;
}

json ConfigJson(const TrainConfig &c) {
  return {{"learning_rate", c.learning_rate}, {"max_epochs", c.max_epochs},
          {"batch_size", c.batch_size},       {"context_width", c.context_width},
          {"hidden_layers", c.hidden_layers}, {"hidden_width", c.hidden_width},
          {"optimizer", std::string(OptimizerName(c.optimizer))}};
}

// --- subcommands -----------------------------------------------------------

void CmdExtractPairs(Context &ctx, int64_t max_gap) {
  const RunConfig &c = ctx.config;
  std::vector<Document> docs = LoadCorpus(Require(c.corpus, "--corpus"));
  std::vector<CandidatePair> all;
  for (const Document &doc : docs) {
    auto pairs = ExtractCandidatePairs(doc, max_gap);
    all.insert(all.end(), std::make_move_iterator(pairs.begin()),
               std::make_move_iterator(pairs.end()));
  }
  WriteFileAtomic(Require(c.pairs, "--out"), SerializePairs(all));
  json report = Envelope(ctx, "extract-pairs");
  report["documents"] = docs.size();
  report["pairs"] = all.size();
  report["invalid_rate"] = nullptr;
  Emit(ctx,
       "documents: " + std::to_string(docs.size()) + "\npairs: " + std::to_string(all.size()) +
           "\ninvalid-rate: n/a (pairs are not yet annotated)\n",
       report);
}

void CmdIaa(Context &ctx, const std::string &a_path, const std::string &b_path,
            const std::string &task_name) {
  const Task task = RequireTask(task_name);
  KappaResult k = CohenKappa(LoadAnnotations(a_path), LoadAnnotations(b_path), task);
  const auto &labels = TaskLabels(task);
  std::ostringstream text;
  text << "task: " << TaskName(task) << "\nn: " << k.n << "\nobserved: " << Fixed(k.observed)
       << "\nexpected: " << Fixed(k.expected) << "\nkappa: " << Fixed(k.kappa)
       << "\nconfusion (rows: first annotator, columns: second):\n";
  char cell[64];
  std::snprintf(cell, sizeof(cell), "%-18s", "");
  text << cell;
  for (const std::string &l : labels) {
    std::snprintf(cell, sizeof(cell), " %16s", l.c_str());
    text << cell;
  }
  text << "\n";
  for (size_t i = 0; i < labels.size(); ++i) {
    std::snprintf(cell, sizeof(cell), "%-18s", labels[i].c_str());
    text << cell;
    for (size_t j = 0; j < labels.size(); ++j) {
      std::snprintf(cell, sizeof(cell), " %16zu", k.confusion[i][j]);
      text << cell;
    }
    text << "\n";
  }
  json report = Envelope(ctx, "iaa");
  report["task"] = std::string(TaskName(task));
  report["n"] = k.n;
  report["observed"] = k.observed;
  report["expected"] = k.expected;
  report["kappa"] = k.kappa;
  report["labels"] = labels;
  report["confusion"] = k.confusion;
  Emit(ctx, text.str(), report);
}

void CmdAdjudicate(Context &ctx, const std::vector<std::string> &inputs,
                   const std::string &adjudicator, const std::string &out_path) {
  std::vector<AnnotationRecord> records;
  for (const std::string &path : inputs) {
    auto part = LoadAnnotations(path);
    records.insert(records.end(), part.begin(), part.end());
  }
  std::vector<AnnotationRecord> gold = Adjudicate(records, adjudicator);
  WriteFileAtomic(Require(out_path, "--out"), SerializeAnnotations(gold));
  json report = Envelope(ctx, "adjudicate");
  report["input_records"] = records.size();
  report["gold_records"] = gold.size();
  Emit(ctx, "gold records: " + std::to_string(gold.size()) + "\n", report);
}

void CmdStats(Context &ctx) {
  std::vector<AnnotationRecord> records =
      LoadAnnotations(Require(ctx.config.annotations, "--annotations"));
  json report = Envelope(ctx, "stats");
  report["records"] = records.size();
  std::string text = "records: " + std::to_string(records.size()) + "\n";
  for (Task task : {Task::kValidity, Task::kSpatial, Task::kTemporal, Task::kTense}) {
    auto counts = LabelDistribution(records, task);
    json jc = json::object();
    text += std::string(TaskName(task)) + ":";
    for (const std::string &label : TaskLabels(task)) {
      auto it = counts.find(label);
      const size_t n = it == counts.end() ? 0 : it->second;
      jc[label] = n;
      text += " " + label + "=" + std::to_string(n);
    }
    text += "\n";
    report["distribution"][std::string(TaskName(task))] = jc;
  }
  Emit(ctx, text, report);
}

void CmdEmbedHash(Context &ctx, int64_t width, size_t dim, const std::string &out_path) {
  const RunConfig &c = ctx.config;
  std::vector<Document> docs = LoadCorpus(Require(c.corpus, "--corpus"));
  std::vector<CandidatePair> pairs = LoadPairs(Require(c.pairs, "--pairs"));
  HashEmbeddingProvider provider(DeriveSeed(c.seed, "hash-embeddings"), dim);
  EmbeddingTable table = BuildEmbeddingTable(provider, pairs, docs, width);
  WriteEmbeddings(Require(out_path, "--out"), table);
  json report = Envelope(ctx, "embed-hash");
  report["records"] = table.size();
  report["dim"] = dim;
  report["width"] = width;
  Emit(ctx, "records: " + std::to_string(table.size()) + "\n", report);
}

void CmdTrain(Context &ctx, const std::string &task_name) {
  const Task task = RequireTask(task_name);
  const RunConfig &c = ctx.config;
  Dataset data = LoadDataset(ctx, task, c.train.context_width);
  Split split = MakeSplit(data.size(), c.split);
  TrainResult run = Train(data, split, c.train);
  SaveModel(ModelPath(ctx, task), run.model);

  std::string text = "model: " + ModelPath(ctx, task) + "\n";
  for (const std::string &w : run.warnings) text += "warning: " + w + "\n";
  if (!run.dev_accuracy.empty()) {
    text += "dev accuracy (final epoch): " + Fixed(run.dev_accuracy.back(), 4) + "\n";
  }
  json report = Envelope(ctx, "train");
  report["task"] = std::string(TaskName(task));
  report["config"] = ConfigJson(c.train);
  report["data"] = DatasetSummary(data, split);
  report["initial_train_loss"] = run.initial_train_loss;
  report["train_loss"] = run.train_loss;
  report["dev_accuracy"] = run.dev_accuracy;
  report["warnings"] = run.warnings;
  report.update(TestEvaluation(run.model, data, split, text));
  WriteJson(ReportPath(ctx, "train_" + std::string(TaskName(task)) + ".json"), report);
  Emit(ctx, text, report);
}

void CmdGrid(Context &ctx, const std::string &task_name) {
  const Task task = RequireTask(task_name);
  Grid grid;
  std::map<int64_t, Dataset> by_width;
  for (int64_t width : grid.context_widths) {
    if (ctx.config.embeddings.count(width) == 0) {
      throw InvalidArgument("missing embeddings for context width " + std::to_string(width));
    }
    by_width.emplace(width, LoadDataset(ctx, task, width));
  }
  const Dataset &reference = by_width.begin()->second;
  Split split = MakeSplit(reference.size(), ctx.config.split);
  GridResult result = GridSearch(by_width, split, ctx.config.train, grid);
  SaveModel(ModelPath(ctx, task), result.best_model);

  std::string csv = "context_width,hidden_layers,epochs,dev_accuracy\n";
  json points = json::array();
  for (const GridPoint &p : result.points) {
    csv += std::to_string(p.context_width) + "," + std::to_string(p.hidden_layers) + "," +
           std::to_string(p.epochs) + "," + Fixed(p.dev_accuracy) + "\n";
    points.push_back({{"context_width", p.context_width},
                      {"hidden_layers", p.hidden_layers},
                      {"epochs", p.epochs},
                      {"dev_accuracy", p.dev_accuracy}});
  }
  std::string text = "best: width=" + std::to_string(result.best_config.context_width) +
                     " hidden_layers=" + std::to_string(result.best_config.hidden_layers) +
                     " epochs=" + std::to_string(result.best_config.max_epochs) +
                     " dev_accuracy=" + Fixed(result.best_dev_accuracy, 4) + "\n";
  json report = Envelope(ctx, "grid");
  report["task"] = std::string(TaskName(task));
  report["best_config"] = ConfigJson(result.best_config);
  report["best_dev_accuracy"] = result.best_dev_accuracy;
  report["data"] = DatasetSummary(reference, split);
  report["points"] = std::move(points);
  report.update(TestEvaluation(result.best_model,
                               by_width.at(result.best_config.context_width), split, text));
  const std::string stem = "grid_" + std::string(TaskName(task));
  WriteFileAtomic(ReportPath(ctx, stem + ".csv"), csv);
  WriteJson(ReportPath(ctx, stem + ".json"), report);
  Emit(ctx, text, report);
}

void CmdCurve(Context &ctx, const std::string &task_name, std::vector<double> fractions,
              int repeats) {
  const Task task = RequireTask(task_name);
  Dataset data = LoadDataset(ctx, task, ctx.config.train.context_width);
  Split split = MakeSplit(data.size(), ctx.config.split);
  if (fractions.empty()) fractions = kDefaultCurveFractions;
  auto curve = LearningCurve(data, split, ctx.config.train, fractions, repeats,
                             DeriveSeed(ctx.config.seed, "curve"));
  const std::string csv = LearningCurveCsv(curve);
  json points = json::array();
  for (const CurvePoint &p : curve) {
    points.push_back({{"fraction", p.fraction},
                      {"train_size", p.train_size},
                      {"mean_accuracy", p.mean_accuracy},
                      {"std", p.std_accuracy},
                      {"accuracies", p.accuracies}});
  }
  json report = Envelope(ctx, "curve");
  report["task"] = std::string(TaskName(task));
  report["repeats"] = repeats;
  report["points"] = std::move(points);
  const std::string stem = "curve_" + std::string(TaskName(task));
  WriteFileAtomic(ReportPath(ctx, stem + ".csv"), csv);
  WriteJson(ReportPath(ctx, stem + ".json"), report);
  Emit(ctx, csv, report);
}

struct EvaluateOptions {
  std::string model;
  std::string predictions;
  std::string constant;
  std::string gold;
  std::string task;
};

void CmdEvaluate(Context &ctx, const EvaluateOptions &opt) {
  std::string text;
  json report = Envelope(ctx, "evaluate");
  if (!opt.model.empty()) {
    TrainedModel model = LoadModel(opt.model);
    Dataset data = LoadDataset(ctx, model.task, model.config.context_width);
    Split split = MakeSplit(data.size(), ctx.config.split);
    report["task"] = std::string(TaskName(model.task));
    report["data"] = DatasetSummary(data, split);
    report.update(TestEvaluation(model, data, split, text));
    WriteJson(ReportPath(ctx, "eval_" + std::string(TaskName(model.task)) + ".json"), report);
    Emit(ctx, text, report);
    return;
  }
  // Predictions (or a constant predictor) against a gold annotation file.
  const Task task = RequireTask(opt.task);
  std::vector<AnnotationRecord> gold_records =
      LoadGold(Require(opt.gold.empty() ? ctx.config.annotations : opt.gold, "--gold"));
  std::vector<int> golds;
  std::vector<int> preds;
  if (!opt.constant.empty()) {
    auto label = LabelIndex(task, opt.constant);
    if (!label) throw InvalidArgument("label '" + opt.constant + "' is not in the task vocabulary");
    for (const AnnotationRecord &r : gold_records) {
      if (auto g = r.Label(task)) {
        golds.push_back(*g);
        preds.push_back(*label);
      }
    }
    report["predictor"] = "constant:" + opt.constant;
  } else {
    const std::string &path = Require(opt.predictions, "--predictions or --constant or --model");
    std::map<std::string, std::string> predicted;
    for (const std::string &line : SplitLines(ReadFile(path))) {
      if (line.empty()) continue;
      json j = json::parse(line);
      predicted[j.at("pair_id").get<std::string>()] = j.at("label").get<std::string>();
    }
    for (const AnnotationRecord &r : gold_records) {
      auto g = r.Label(task);
      if (!g) continue;
      auto it = predicted.find(r.pair_id);
      if (it == predicted.end()) {
        throw InvalidArgument("no prediction for gold pair '" + r.pair_id + "'");
      }
      golds.push_back(*g);
      preds.push_back(LabelIndices(task, {it->second}).front());
    }
    report["predictor"] = "file:" + path;
  }
  EvalReport eval = PerClassPrf(preds, golds, task);
  report["task"] = std::string(TaskName(task));
  report["report"] = EvalJson(eval);
  WriteJson(ReportPath(ctx, "eval_" + std::string(TaskName(task)) + ".json"), report);
  Emit(ctx, EvalReportTable(eval), report);
}

void CmdPredict(Context &ctx, const std::string &model_path, const std::string &embeddings_path,
                const std::string &out_path) {
  TrainedModel model = LoadModel(Require(model_path, "--model"));
  std::vector<CandidatePair> pairs = LoadPairs(Require(ctx.config.pairs, "--pairs"));
  EmbeddingTable table = LoadEmbeddings(Require(embeddings_path, "--embeddings"));
  std::string lines;
  std::vector<GroundingPrediction> grounding;
  for (const CandidatePair &pair : pairs) {
    Prediction p = Predict(model, PairFeatureFor(table, pair));
    const double prob = p.probs[static_cast<size_t>(p.label)];
    if (model.task == Task::kSpatial) {
      GroundingPrediction g;
      g.pair_id = pair.pair_id;
      g.doc_id = pair.doc_id;
      g.character_id = pair.character.entity_id.value_or(pair.character.mention_id);
      g.place_mention_id = pair.place.mention_id;
      g.place_form = NormalizePlaceForm(pair.place_text);
      g.place_entity_id = pair.place.entity_id;
      g.label = static_cast<SpatialRel>(p.label);
      g.probability = prob;
      grounding.push_back(std::move(g));
    } else {
      json j = {{"pair_id", pair.pair_id},
                {"doc_id", pair.doc_id},
                {"task", std::string(TaskName(model.task))},
                {"label", model.labels[static_cast<size_t>(p.label)]},
                {"probability", prob}};
      lines += j.dump() + "\n";
    }
  }
  if (model.task == Task::kSpatial) lines = SerializePredictions(grounding);
  WriteFileAtomic(Require(out_path, "--out"), lines);
  json report = Envelope(ctx, "predict");
  report["task"] = std::string(TaskName(model.task));
  report["predictions"] = pairs.size();
  Emit(ctx, "predictions: " + std::to_string(pairs.size()) + "\n", report);
}

std::map<std::string, std::optional<int>> DocYears(const std::string &corpus_path) {
  std::map<std::string, std::optional<int>> years;
  for (const Document &d : LoadCorpus(corpus_path)) years[d.doc_id] = d.year;
  return years;
}

json MobilityJson(const MobilityReport &r) { return json::parse(MobilityReportJson(r)); }

std::string MobilityLine(const std::string &group, const MobilityReport &r) {
  return group + "," + Fixed(r.mean_relative_difference) + "," +
         Fixed(r.std_relative_difference) + "," + std::to_string(r.repeats) + "," +
         std::to_string(r.books_used) + "," + std::to_string(r.books_skipped) + "\n";
}

void CmdAnalyze(Context &ctx, const std::string &kind) {
  const RunConfig &c = ctx.config;
  std::vector<GroundingPrediction> predictions =
      LoadPredictions(Require(c.predictions, "--predictions"));
  std::vector<CharacterProfile> profiles = LoadProfiles(Require(c.profiles, "--profiles"));
  json report = Envelope(ctx, "analyze " + kind);
  std::string text;
  if (kind == "mobility") {
    MobilityReport overall = ProtagonistMobilityExperiment(predictions, profiles, c.mobility);
    auto by_gender = GenderStratifiedMobility(predictions, profiles, c.mobility);
    report["overall"] = MobilityJson(overall);
    report["by_gender"] = json::object();
    std::string csv = "group,mean_relative_difference,std,repeats,books_used,books_skipped\n";
    csv += MobilityLine("all", overall);
    text = "protagonists vs rivals: " + Fixed(overall.mean_relative_difference * 100, 2) +
           "% (+/- " + Fixed(overall.std_relative_difference * 100, 2) + "%) over " +
           std::to_string(overall.repeats) + " repeats, " +
           std::to_string(overall.books_used) + " books\n";
    for (const auto &[gender, r] : by_gender) {
      const std::string name(GenderName(gender));
      report["by_gender"][name] = MobilityJson(r);
      csv += MobilityLine(name, r);
      text += name + " protagonists: " + Fixed(r.mean_relative_difference * 100, 2) +
              "% (+/- " + Fixed(r.std_relative_difference * 100, 2) + "%)\n";
    }
    WriteFileAtomic(ReportPath(ctx, "mobility.csv"), csv);
    WriteJson(ReportPath(ctx, "mobility.json"), report);
  } else if (kind == "indoor") {
    ProclivityReport r =
        IndoorProclivity(predictions, LoadLexicon(Require(c.lexicon, "--lexicon")), profiles);
    report["proclivity"] = json::parse(ProclivityReportJson(r));
    const std::string csv = "bucket,gender,p,ci_low,ci_high,n\n" + ProclivityCsv(r);
    for (const auto &[name, cell] : {std::pair{"HE", r.he}, std::pair{"SHE", r.she}}) {
      text += std::string(name) + ": " +
              (cell ? Fixed(cell->p, 4) + " +/- " + Fixed(cell->half_width, 4) +
                          " (n=" + std::to_string(cell->n) + ")"
                    : std::string("absent")) +
              "\n";
    }
    WriteFileAtomic(ReportPath(ctx, "indoor.csv"), csv);
    WriteJson(ReportPath(ctx, "indoor.json"), report);
  } else {
    TemporalSliceReport r =
        TemporalSliceProclivity(predictions, LoadLexicon(Require(c.lexicon, "--lexicon")),
                                profiles, DocYears(Require(c.corpus, "--corpus")));
    report["slices"] = json::parse(TemporalSliceReportJson(r));
    text = TemporalSliceCsv(r);
    WriteFileAtomic(ReportPath(ctx, "slices.csv"), text);
    WriteJson(ReportPath(ctx, "slices.json"), report);
  }
  Emit(ctx, text, report);
}

void CmdLexiconSkeleton(Context &ctx, const std::string &out_path) {
  auto places = BuildPlaceLexicon(
      LoadPredictions(Require(ctx.config.predictions, "--predictions")), ctx.config.top_k);
  WriteFileAtomic(Require(out_path, "--out"), LexiconSkeletonTsv(places));
  json report = Envelope(ctx, "lexicon-skeleton");
  report["places"] = places.size();
  Emit(ctx, "places: " + std::to_string(places.size()) + "\n", report);
}

void PrintError(std::ostream &err, const std::string &kind, const std::string &message) {
  err << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Character/place grounding toolkit", "grounding"};
  app.require_subcommand(1);

  CommonOptions common;
  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--config", common.config_path, "key = value configuration file");
    sub->add_option("--seed", common.seed, "global seed (overrides config)");
    sub->add_option("--out-dir", common.out_dir, "directory for reports and models");
    sub->add_option("--set", common.overrides, "override a config key: key=value");
    sub->add_flag("--json", common.json_output, "machine-readable JSON on stdout");
  };
  // Per-subcommand values that map onto config keys.
  std::map<std::string, std::string> path_flags;
  auto add_path = [&](CLI::App *sub, const std::string &flag, const std::string &key,
                      const std::string &help) {
    sub->add_option_function<std::string>(
        flag, [&path_flags, key](const std::string &v) { path_flags[key] = v; }, help);
  };

  int64_t max_gap = kDefaultMaxGap;
  auto *extract = app.add_subcommand("extract-pairs", "extract candidate pairs from a corpus");
  add_common(extract);
  add_path(extract, "--corpus", "corpus", "corpus JSONL");
  add_path(extract, "--out", "pairs", "output pair JSONL");
  extract->add_option("--max-gap", max_gap, "maximum token distance");

  std::string iaa_a, iaa_b, task_name;
  auto *iaa = app.add_subcommand("iaa", "Cohen's kappa between two annotation files");
  add_common(iaa);
  iaa->add_option("--a", iaa_a, "first annotator TSV")->required();
  iaa->add_option("--b", iaa_b, "second annotator TSV")->required();
  iaa->add_option("--task", task_name, "validity|spatial|temporal|tense")->required();

  std::vector<std::string> adj_inputs;
  std::string adjudicator, out_path;
  auto *adjudicate = app.add_subcommand("adjudicate", "merge annotator files into gold");
  add_common(adjudicate);
  adjudicate->add_option("--annotations", adj_inputs, "annotation TSV files")->required();
  adjudicate->add_option("--adjudicator", adjudicator, "annotator id that resolves ties")
      ->required();
  adjudicate->add_option("--out", out_path, "gold TSV")->required();

  auto *stats = app.add_subcommand("stats", "label distribution of an annotation file");
  add_common(stats);
  add_path(stats, "--annotations", "annotations", "annotation TSV");

  int64_t width = 100;
  size_t dim = 16;
  auto *embed = app.add_subcommand("embed-hash", "write hash pseudo-embeddings (test double)");
  add_common(embed);
  add_path(embed, "--corpus", "corpus", "corpus JSONL");
  add_path(embed, "--pairs", "pairs", "pair JSONL");
  embed->add_option("--width", width, "context width");
  embed->add_option("--dim", dim, "vector dimension");
  embed->add_option("--out", out_path, "NGEMB1 output")->required();

  std::optional<int64_t> train_width;
  auto *train = app.add_subcommand("train", "train one task head");
  add_common(train);
  train->add_option("--task", task_name, "validity|spatial|temporal|tense")->required();
  train->add_option("--width", train_width, "context width (overrides train.context_width)");

  auto *grid = app.add_subcommand("grid", "hyperparameter grid search on the dev split");
  add_common(grid);
  grid->add_option("--task", task_name, "validity|spatial|temporal|tense")->required();

  std::vector<double> fractions;
  int repeats = 3;
  auto *curve = app.add_subcommand("curve", "learning curve over training-set fractions");
  add_common(curve);
  curve->add_option("--task", task_name, "validity|spatial|temporal|tense")->required();
  curve->add_option("--fractions", fractions, "training fractions");
  curve->add_option("--repeats", repeats, "subsamples per fraction");

  EvaluateOptions eval_opt;
  auto *evaluate = app.add_subcommand("evaluate", "score a model or predictions");
  add_common(evaluate);
  evaluate->add_option("--model", eval_opt.model, "model JSON (scored on the test split)");
  evaluate->add_option("--predictions", eval_opt.predictions, "prediction JSONL");
  evaluate->add_option("--constant", eval_opt.constant, "score a constant predictor");
  evaluate->add_option("--gold", eval_opt.gold, "gold annotation TSV");
  evaluate->add_option("--task", eval_opt.task, "task for --predictions/--constant");

  std::string model_path, embeddings_path;
  auto *predict = app.add_subcommand("predict", "label candidate pairs with a model");
  add_common(predict);
  predict->add_option("--model", model_path, "model JSON")->required();
  add_path(predict, "--pairs", "pairs", "pair JSONL");
  predict->add_option("--embeddings", embeddings_path, "NGEMB1 file")->required();
  predict->add_option("--out", out_path, "prediction JSONL")->required();

  std::string analysis_kind;
  auto *analyze = app.add_subcommand("analyze", "mobility, indoor proclivity or time slices");
  add_common(analyze);
  analyze->add_option("kind", analysis_kind, "mobility|indoor|slices")
      ->required()
      ->check(CLI::IsMember({"mobility", "indoor", "slices"}));
  add_path(analyze, "--predictions", "predictions", "prediction JSONL");
  add_path(analyze, "--profiles", "profiles", "character profile JSONL");
  add_path(analyze, "--lexicon", "lexicon", "indoor/outdoor lexicon TSV");
  add_path(analyze, "--corpus", "corpus", "corpus JSONL (publication years)");

  std::optional<size_t> top_k;
  auto *lexicon = app.add_subcommand("lexicon-skeleton", "most frequent IN places to label");
  add_common(lexicon);
  add_path(lexicon, "--predictions", "predictions", "prediction JSONL");
  lexicon->add_option("--k", top_k, "number of places");
  lexicon->add_option("--out", out_path, "lexicon TSV")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp &e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError &e) {
    PrintError(err, "usage", e.what());
    return 2;
  }

  try {
    Context ctx{RunConfig{}, common.json_output, out};
    if (!common.config_path.empty()) LoadConfigFile(ctx.config, common.config_path);
    for (const std::string &kv : common.overrides) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw InvalidArgument("--set expects key=value, got '" + kv + "'");
      SetConfigValue(ctx.config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto &[key, value] : path_flags) SetConfigValue(ctx.config, key, value);
    if (common.seed) ctx.config.seed = *common.seed;
    if (!common.out_dir.empty()) {
      ctx.config.report_dir = common.out_dir;
      ctx.config.model_dir = common.out_dir;
    }
    if (train_width) ctx.config.train.context_width = *train_width;
    if (top_k) ctx.config.top_k = *top_k;
    ctx.config.Finalize();

    if (extract->parsed()) {
      CmdExtractPairs(ctx, max_gap);
    } else if (iaa->parsed()) {
      CmdIaa(ctx, iaa_a, iaa_b, task_name);
    } else if (adjudicate->parsed()) {
      CmdAdjudicate(ctx, adj_inputs, adjudicator, out_path);
    } else if (stats->parsed()) {
      CmdStats(ctx);
    } else if (embed->parsed()) {
      CmdEmbedHash(ctx, width, dim, out_path);
    } else if (train->parsed()) {
      CmdTrain(ctx, task_name);
    } else if (grid->parsed()) {
      CmdGrid(ctx, task_name);
    } else if (curve->parsed()) {
      CmdCurve(ctx, task_name, fractions, repeats);
    } else if (evaluate->parsed()) {
      CmdEvaluate(ctx, eval_opt);
    } else if (predict->parsed()) {
      CmdPredict(ctx, model_path, embeddings_path, out_path);
    } else if (analyze->parsed()) {
      CmdAnalyze(ctx, analysis_kind);
    } else if (lexicon->parsed()) {
      CmdLexiconSkeleton(ctx, out_path);
    }
  } catch (const Error &e) {
    PrintError(err, e.kind(), e.what());
    return 1;
  } catch (const json::exception &e) {
    PrintError(err, "parse", e.what());
    return 1;
  } catch (const std::exception &e) {
    PrintError(err, "internal", e.what());
    return 1;
  }
  return 0;
}

}  // namespace grounding::cli
