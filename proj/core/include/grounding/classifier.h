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

#ifndef GROUNDING_CLASSIFIER_H_
#define GROUNDING_CLASSIFIER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grounding/annotation.h"
#include "grounding/corpus.h"
#include "grounding/embeddings.h"
#include "grounding/random.h"

namespace grounding {

// Row-major dense matrix.
struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double &at(size_t r, size_t c) { return data[r * cols + c]; }
  double at(size_t r, size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(size_t r) const {
    return std::span<const double>(data).subspan(r * cols, cols);
  }
  bool operator==(const Matrix &) const = default;
};

// Affine layer: out = weights * in + bias, weights is (out x in).
struct DenseLayer {
  Matrix weights;
  std::vector<double> bias;
  bool operator==(const DenseLayer &) const = default;
};

// Feedforward net over a pair feature: zero or one sigmoid hidden layer
// followed by an affine output layer. The same shape holds gradients.
struct MLPParams {
  std::vector<DenseLayer> layers;

  size_t input_dim() const { return layers.front().weights.cols; }
  size_t output_dim() const { return layers.back().weights.rows; }
  int hidden_layers() const { return static_cast<int>(layers.size()) - 1; }
  size_t hidden_width() const {
    return layers.size() > 1 ? layers.front().weights.rows : 0;
  }

  // Zero-filled parameters of the same shape.
  MLPParams ZerosLike() const;
  // Throws InvalidArgument if adjacent layer dimensions do not chain.
  void Validate() const;
  bool operator==(const MLPParams &) const = default;
};

// Weights and biases drawn from uniform(-init_scale, init_scale).
MLPParams InitParams(size_t input_dim, int hidden_layers, size_t hidden_width,
                     size_t num_classes, Rng &rng, double init_scale = 0.05);

std::vector<double> Softmax(std::span<const double> logits);
double Sigmoid(double z);

// Class probabilities, softmax(feedforward(x)).
std::vector<double> Forward(const MLPParams &params, std::span<const double> x);
std::vector<double> Logits(const MLPParams &params, std::span<const double> x);

inline constexpr double kProbabilityFloor = 1e-12;

// -log(probs[gold]), with probs[gold] floored at kProbabilityFloor.
double CrossEntropy(std::span<const double> probs, int gold);

struct Example {
  std::span<const double> features;
  int label = 0;
};

struct GradientResult {
  MLPParams gradient;
  double loss = 0.0;  // mean cross entropy over the batch
};

// Exact gradient of the mean batch cross entropy. Throws on an empty batch.
GradientResult ComputeGradients(const MLPParams &params,
                                std::span<const Example> batch);

double MeanLoss(const MLPParams &params, std::span<const Example> batch);

enum class Optimizer { kSgd, kAdam };

struct TrainConfig {
  double learning_rate = 1e-5;
  int max_epochs = 15;
  int batch_size = 32;  // 0 means full batch
  int64_t context_width = 100;
  int hidden_layers = 1;
  size_t hidden_width = 256;
  uint64_t rng_seed = 0;
  Optimizer optimizer = Optimizer::kSgd;

  void Validate() const;
  bool operator==(const TrainConfig &) const = default;
};

struct SplitSpec {
  double train = 0.70;
  double dev = 0.10;
  double test = 0.20;
  uint64_t seed = 0;
};

// Index partition of a dataset.
struct Split {
  std::vector<size_t> train;
  std::vector<size_t> dev;
  std::vector<size_t> test;
};

// Seeded shuffle of [0, n), then round(train * n) train items, round(dev * n)
// dev items, the remainder test.
Split MakeSplit(size_t n, const SplitSpec &spec);

// Features and gold labels for one task, aligned by position.
struct Dataset {
  Task task = Task::kSpatial;
  std::vector<std::string> ids;
  std::vector<PairFeature> features;
  std::vector<int> labels;

  size_t size() const { return labels.size(); }
  size_t feature_dim() const { return features.empty() ? 0 : features.front().size(); }
  std::vector<Example> Examples(std::span<const size_t> indices) const;
  void Validate() const;
};

// Joins gold records with pairs and embeddings. Validity uses every record,
// the other tasks only records where the task applies (VALID and labelled).
// Examples are ordered by pair_id.
Dataset BuildDataset(Task task, const std::vector<AnnotationRecord> &gold,
                     const std::vector<CandidatePair> &pairs,
                     const EmbeddingTable &table);

struct TrainedModel {
  Task task = Task::kSpatial;
  std::vector<std::string> labels;
  MLPParams params;
  TrainConfig config;
};

struct TrainResult {
  TrainedModel model;
  double initial_train_loss = 0.0;
  std::vector<double> train_loss;    // after each epoch
  std::vector<double> dev_accuracy;  // after each epoch; empty dev gives 0
  std::vector<std::string> warnings;
};

// Mini-batch descent for config.max_epochs epochs. Initialization and
// shuffling derive from config.rng_seed, so epoch e of a longer run matches
// the final state of a run with max_epochs = e.
TrainResult Train(const Dataset &data, const Split &split, const TrainConfig &config);

struct Prediction {
  int label = 0;
  std::vector<double> probs;
};

// Argmax with ties to the lowest label index.
Prediction Predict(const TrainedModel &model, std::span<const double> x);
int Argmax(std::span<const double> values);

// Accuracy of the model on the given rows.
double ModelAccuracy(const TrainedModel &model, const Dataset &data,
                     std::span<const size_t> indices);

struct Grid {
  std::vector<int> epochs = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
  std::vector<int> hidden_layers = {0, 1};
  std::vector<int64_t> context_widths = {10, 50, 100};
};

struct GridPoint {
  int64_t context_width = 0;
  int hidden_layers = 0;
  int epochs = 0;
  double dev_accuracy = 0.0;
};

struct GridResult {
  TrainConfig best_config;
  TrainedModel best_model;
  double best_dev_accuracy = 0.0;
  std::vector<GridPoint> points;
};

// Maximizes dev accuracy over the grid; ties go to fewer epochs, then fewer
// hidden layers, then the smaller width. Every dataset must hold the same
// examples in the same order. Throws InvalidArgument naming a missing width.
GridResult GridSearch(const std::map<int64_t, Dataset> &by_width,
                      const Split &split, const TrainConfig &base,
                      const Grid &grid = Grid());

std::string_view OptimizerName(Optimizer o);
std::optional<Optimizer> ParseOptimizer(std::string_view name);

// Model file: JSON with task, label_vocab, dims, hidden_layers, hidden_width,
// weights (row-major nested arrays), config and seed.
std::string SerializeModel(const TrainedModel &model);
TrainedModel ParseModel(std::string_view text);
TrainedModel LoadModel(const std::string &path);
void SaveModel(const std::string &path, const TrainedModel &model);

}  // namespace grounding

#endif  // GROUNDING_CLASSIFIER_H_
