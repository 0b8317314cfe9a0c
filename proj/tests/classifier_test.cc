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

#include "grounding/classifier.h"

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "grounding/error.h"
#include "oracles.h"
#include "synthetic.h"

namespace grounding {
namespace {

std::vector<Example> RandomBatch(Rng &rng, size_t n, size_t dim, int classes,
                                 std::vector<std::vector<double>> &storage) {
  storage.assign(n, std::vector<double>(dim));
  std::vector<Example> batch;
  for (size_t i = 0; i < n; ++i) {
    for (double &v : storage[i]) v = rng.Uniform(-1, 1);
    batch.push_back({storage[i], static_cast<int>(rng.UniformInt(classes))});
  }
  return batch;
}

TEST(Softmax, KnownValues) {
  std::vector<double> logits = {std::log(2.0), 0.0};
  auto p = Softmax(logits);
  EXPECT_NEAR(p[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(p[1], 1.0 / 3.0, 1e-12);
  std::vector<double> huge = {1000.0, 1000.0, -1000.0};
  auto q = Softmax(huge);
  EXPECT_NEAR(q[0], 0.5, 1e-12);
  EXPECT_TRUE(std::isfinite(q[2]));
}

TEST(Softmax, RowsSumToOne) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> z(1 + rng.UniformInt(8));
    for (double &v : z) v = rng.Uniform(-50, 50);
    auto p = Softmax(z);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
  }
}

TEST(CrossEntropy, KnownValues) {
  std::vector<double> uniform(6, 1.0 / 6.0);
  EXPECT_NEAR(CrossEntropy(uniform, 2), 1.791759, 1e-6);
  std::vector<double> p = {0.75, 0.25};
  EXPECT_NEAR(CrossEntropy(p, 0), 0.287682, 1e-6);
  std::vector<double> zero = {1.0, 0.0};
  EXPECT_NEAR(CrossEntropy(zero, 1), -std::log(kProbabilityFloor), 1e-9);
}

TEST(InitParams, ShapesAndRange) {
  Rng rng(3);
  MLPParams p = InitParams(1536, 1, 50, 6, rng);
  EXPECT_EQ(p.input_dim(), 1536u);
  EXPECT_EQ(p.hidden_width(), 50u);
  EXPECT_EQ(p.output_dim(), 6u);
  for (const DenseLayer &l : p.layers) {
    for (double w : l.weights.data) EXPECT_LE(std::abs(w), 0.05);
  }
  MLPParams linear = InitParams(16, 0, 0, 2, rng);
  EXPECT_EQ(linear.hidden_layers(), 0);
  EXPECT_EQ(linear.layers.size(), 1u);
}

TEST(Gradients, MatchFiniteDifferences) {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int classes = trial % 2 ? 6 : 2;
    const int hidden = trial % 3 == 0 ? 0 : 1;
    MLPParams params = InitParams(16, hidden, 4, classes, rng, 1.0);
    std::vector<std::vector<double>> storage;
    auto batch = RandomBatch(rng, 5, 16, classes, storage);
    GradientResult g = ComputeGradients(params, batch);
    EXPECT_NEAR(g.loss, MeanLoss(params, batch), 1e-12);
    auto numeric = testing::NumericGradient(params, batch, 1e-4);
    EXPECT_LT(testing::MaxRelativeError(testing::Flatten(g.gradient), numeric), 1e-4);
  }
}

TEST(Predict, ArgmaxInvariantToOutputBiasShift) {
  Rng rng(9);
  MLPParams params = InitParams(8, 1, 4, 6, rng, 1.0);
  TrainedModel model{Task::kSpatial, TaskLabels(Task::kSpatial), params, {}};
  TrainedModel shifted = model;
  for (double &b : shifted.params.layers.back().bias) b += 3.7;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x(8);
    for (double &v : x) v = rng.Uniform(-2, 2);
    EXPECT_EQ(Predict(model, x).label, Predict(shifted, x).label);
  }
}

TEST(Predict, TiesGoToLowestIndex) {
  std::vector<double> v = {0.2, 0.5, 0.5, 0.1};
  EXPECT_EQ(Argmax(v), 1);
  Rng rng(1);
  MLPParams params = InitParams(2, 0, 0, 3, rng);
  for (auto &l : params.layers) {
    std::fill(l.weights.data.begin(), l.weights.data.end(), 0.0);
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
  }
  TrainedModel model{Task::kSpatial, {"a", "b", "c"}, params, {}};
  std::vector<double> x = {1.0, 2.0};
  EXPECT_EQ(Predict(model, x).label, 0);
}

TEST(MakeSplit, SizesAndDisjointness) {
  for (size_t n : {1, 7, 10, 99, 100, 2506}) {
    SplitSpec spec;
    spec.seed = n;
    Split s = MakeSplit(n, spec);
    EXPECT_EQ(s.train.size() + s.dev.size() + s.test.size(), n);
    EXPECT_LE(std::abs(static_cast<double>(s.train.size()) - 0.7 * n), 1.0);
    EXPECT_LE(std::abs(static_cast<double>(s.dev.size()) - 0.1 * n), 1.0);
    EXPECT_LE(std::abs(static_cast<double>(s.test.size()) - 0.2 * n), 1.0);
    std::vector<size_t> all = s.train;
    all.insert(all.end(), s.dev.begin(), s.dev.end());
    all.insert(all.end(), s.test.begin(), s.test.end());
    std::sort(all.begin(), all.end());
    for (size_t i = 0; i < n; ++i) EXPECT_EQ(all[i], i);
  }
  SplitSpec spec;
  EXPECT_EQ(MakeSplit(50, spec).test, MakeSplit(50, spec).test);
  SplitSpec bad;
  bad.train = 0.9;
  EXPECT_THROW(MakeSplit(10, bad), InvalidArgument);
}

TEST(Train, FullBatchLossIsNonIncreasing) {
  auto study = testing::MakeSeparableStudy(4, 40, 3);
  Dataset data = testing::HashDataset(study, 4, 8);
  Split split;
  split.train.resize(data.size());
  std::iota(split.train.begin(), split.train.end(), 0);
  TrainConfig config;
  config.learning_rate = 0.01;
  config.batch_size = 0;
  config.max_epochs = 30;
  config.hidden_layers = 1;
  config.hidden_width = 5;
  TrainResult r = Train(data, split, config);
  double previous = r.initial_train_loss;
  for (double loss : r.train_loss) {
    EXPECT_LE(loss, previous + 1e-12);
    previous = loss;
  }
}

TEST(Train, OverfitsSeparableSetDeterministically) {
  auto study = testing::MakeSeparableStudy(8, 64, 6);
  Dataset data = testing::HashDataset(study, 8, 16);
  Split split;
  split.train.resize(data.size());
  std::iota(split.train.begin(), split.train.end(), 0);
  TrainConfig config;
  config.learning_rate = 0.1;
  config.max_epochs = 200;
  config.batch_size = 8;
  config.hidden_layers = 0;
  config.rng_seed = 5;
  TrainResult a = Train(data, split, config);
  EXPECT_DOUBLE_EQ(ModelAccuracy(a.model, data, split.train), 1.0);
  TrainResult b = Train(data, split, config);
  EXPECT_EQ(a.model.params, b.model.params);
}

TEST(Train, ShorterRunIsPrefixOfLongerRun) {
  auto study = testing::MakeSeparableStudy(2, 30, 2);
  Dataset data = testing::HashDataset(study, 2, 8);
  Split split = MakeSplit(data.size(), SplitSpec{});
  TrainConfig config;
  config.learning_rate = 0.05;
  config.hidden_layers = 1;
  config.hidden_width = 4;
  config.max_epochs = 6;
  TrainResult longer = Train(data, split, config);
  config.max_epochs = 3;
  TrainResult shorter = Train(data, split, config);
  for (int e = 0; e < 3; ++e) {
    EXPECT_DOUBLE_EQ(shorter.train_loss[e], longer.train_loss[e]);
    EXPECT_DOUBLE_EQ(shorter.dev_accuracy[e], longer.dev_accuracy[e]);
  }
}

TEST(Train, WarnsOnSingleClassAndRejectsBadConfig) {
  auto study = testing::MakeSeparableStudy(2, 10, 1);
  Dataset data = testing::HashDataset(study, 2, 4);
  Split split = MakeSplit(data.size(), SplitSpec{});
  TrainConfig config;
  config.max_epochs = 1;
  TrainResult r = Train(data, split, config);
  EXPECT_FALSE(r.warnings.empty());
  config.learning_rate = -1;
  EXPECT_THROW(Train(data, split, config), InvalidArgument);
}

TEST(Train, AdamReducesLoss) {
  auto study = testing::MakeSeparableStudy(3, 40, 4);
  Dataset data = testing::HashDataset(study, 3, 8);
  Split split = MakeSplit(data.size(), SplitSpec{});
  TrainConfig config;
  config.optimizer = Optimizer::kAdam;
  config.learning_rate = 0.01;
  config.max_epochs = 20;
  config.hidden_width = 8;
  TrainResult r = Train(data, split, config);
  EXPECT_LT(r.train_loss.back(), r.initial_train_loss);
}

TEST(BuildDataset, AlignsAndFiltersByTask) {
  auto study = testing::MakeSeparableStudy(1, 6, 2);
  study.gold[1] = testing::InvalidRecord(study.gold[1].pair_id, "gold");
  HashEmbeddingProvider provider(1, 4);
  EmbeddingTable table = BuildEmbeddingTable(provider, study.pairs, study.docs, 10);
  Dataset spatial = BuildDataset(Task::kSpatial, study.gold, study.pairs, table);
  Dataset validity = BuildDataset(Task::kValidity, study.gold, study.pairs, table);
  EXPECT_EQ(spatial.size(), 5u);
  EXPECT_EQ(validity.size(), 6u);
  EXPECT_EQ(spatial.feature_dim(), 8u);
  EXPECT_TRUE(std::is_sorted(validity.ids.begin(), validity.ids.end()));
  auto dup = study.gold;
  dup.push_back(dup[0]);
  EXPECT_THROW(BuildDataset(Task::kSpatial, dup, study.pairs, table), InvalidArgument);
  EmbeddingTable empty(4);
  EXPECT_THROW(BuildDataset(Task::kSpatial, study.gold, study.pairs, empty), Error);
}

TEST(GridSearch, PicksBestAndBreaksTiesTowardSmallerModels) {
  auto study = testing::MakeSeparableStudy(6, 60, 3);
  std::map<int64_t, Dataset> by_width;
  for (int64_t w : {1, 2}) by_width.emplace(w, testing::HashDataset(study, 6, 8, w));
  Split split = MakeSplit(60, SplitSpec{});
  TrainConfig base;
  base.learning_rate = 0.1;
  base.hidden_width = 4;
  Grid grid;
  grid.epochs = {1, 2, 3, 4, 5};
  grid.context_widths = {1, 2};
  GridResult r = GridSearch(by_width, split, base, grid);
  EXPECT_EQ(r.points.size(), 5u * 2u * 2u);
  double best = 0.0;
  for (const GridPoint &p : r.points) best = std::max(best, p.dev_accuracy);
  EXPECT_DOUBLE_EQ(r.best_dev_accuracy, best);
  // The chosen cell is the first maximum under the tie-break key.
  const GridPoint *first = nullptr;
  for (const GridPoint &p : r.points) {
    if (p.dev_accuracy != best) continue;
    auto key = [](const GridPoint &g) {
      return std::make_tuple(g.epochs, g.hidden_layers, g.context_width);
    };
    if (!first || key(p) < key(*first)) first = &p;
  }
  EXPECT_EQ(r.best_config.max_epochs, first->epochs);
  EXPECT_EQ(r.best_config.hidden_layers, first->hidden_layers);
  EXPECT_EQ(r.best_config.context_width, first->context_width);
  // The retrained model reproduces the dev accuracy recorded for its cell.
  EXPECT_DOUBLE_EQ(ModelAccuracy(r.best_model, by_width.at(first->context_width), split.dev),
                   best);
  grid.context_widths = {1, 3};
  EXPECT_THROW(GridSearch(by_width, split, base, grid), InvalidArgument);
}

TEST(ModelJson, RoundTripReproducesPredictions) {
  auto study = testing::MakeSeparableStudy(12, 20, 6);
  Dataset data = testing::HashDataset(study, 12, 4);
  Split split = MakeSplit(data.size(), SplitSpec{});
  TrainConfig config;
  config.hidden_width = 3;
  config.max_epochs = 2;
  config.learning_rate = 0.3;
  TrainedModel model = Train(data, split, config).model;
  const std::string text = SerializeModel(model);
  TrainedModel loaded = ParseModel(text);
  EXPECT_EQ(SerializeModel(loaded), text);
  EXPECT_EQ(loaded.params, model.params);
  for (const auto &x : data.features) {
    Prediction a = Predict(model, x), b = Predict(loaded, x);
    EXPECT_EQ(a.label, b.label);
    EXPECT_EQ(a.probs, b.probs);
  }
}

TEST(ModelJson, RejectsInconsistentFiles) {
  Rng rng(1);
  TrainedModel model{Task::kTense, TaskLabels(Task::kTense), InitParams(4, 1, 2, 2, rng), {}};
  std::string text = SerializeModel(model);
  EXPECT_NO_THROW(ParseModel(text));
  EXPECT_THROW(ParseModel("{}"), Error);
  std::string wrong_task = text;
  wrong_task.replace(wrong_task.find("\"tense\""), 7, "\"spatial\"");
  EXPECT_THROW(ParseModel(wrong_task), Error);
}

}  // namespace
}  // namespace grounding
