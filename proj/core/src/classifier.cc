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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include "json.hpp"

#include "grounding/error.h"
#include "grounding/io.h"

namespace grounding {

using nlohmann::json;

namespace {

// out = W x + b
void Affine(const DenseLayer &layer, std::span<const double> x,
            std::vector<double> &out) {
  const Matrix &w = layer.weights;
  out.assign(w.rows, 0.0);
  for (size_t r = 0; r < w.rows; ++r) {
    const double *row = &w.data[r * w.cols];
    double acc = layer.bias[r];
    for (size_t c = 0; c < w.cols; ++c) acc += row[c] * x[c];
    out[r] = acc;
  }
}

void CheckInput(const MLPParams &params, std::span<const double> x) {
  if (params.layers.empty()) throw InvalidArgument("model has no layers");
  if (x.size() != params.input_dim()) {
    throw InvalidArgument("feature dimension " + std::to_string(x.size()) +
                          " does not match model input " +
                          std::to_string(params.input_dim()));
  }
}

void ForEachParam(MLPParams &a, const MLPParams &b,
                  const auto &fn) {
  for (size_t l = 0; l < a.layers.size(); ++l) {
    auto &wa = a.layers[l].weights.data;
    const auto &wb = b.layers[l].weights.data;
    for (size_t i = 0; i < wa.size(); ++i) fn(wa[i], wb[i]);
    auto &ba = a.layers[l].bias;
    const auto &bb = b.layers[l].bias;
    for (size_t i = 0; i < ba.size(); ++i) fn(ba[i], bb[i]);
  }
}

class AdamState {
 public:
  explicit AdamState(const MLPParams &shape)
      : m_(shape.ZerosLike()), v_(shape.ZerosLike()) {}

  void Step(MLPParams &params, const MLPParams &grad, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, t_);
    const double c2 = 1.0 - std::pow(kBeta2, t_);
    for (size_t l = 0; l < params.layers.size(); ++l) {
      Update(params.layers[l].weights.data, grad.layers[l].weights.data,
             m_.layers[l].weights.data, v_.layers[l].weights.data, lr, c1, c2);
      Update(params.layers[l].bias, grad.layers[l].bias, m_.layers[l].bias,
             v_.layers[l].bias, lr, c1, c2);
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  static void Update(std::vector<double> &p, const std::vector<double> &g,
                     std::vector<double> &m, std::vector<double> &v, double lr,
                     double c1, double c2) {
    for (size_t i = 0; i < p.size(); ++i) {
      m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
      v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
      p[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + kEpsilon);
    }
  }

  MLPParams m_;
  MLPParams v_;
  int t_ = 0;
};

json ConfigJson(const TrainConfig &c) {
  json j;
  j["learning_rate"] = c.learning_rate;
  j["max_epochs"] = c.max_epochs;
  j["batch_size"] = c.batch_size;
  j["context_width"] = c.context_width;
  j["hidden_layers"] = c.hidden_layers;
  j["hidden_width"] = c.hidden_width;
  j["rng_seed"] = c.rng_seed;
  j["optimizer"] = std::string(OptimizerName(c.optimizer));
  return j;
}

TrainConfig ConfigFromJson(const json &j) {
  TrainConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.max_epochs = j.at("max_epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.context_width = j.at("context_width").get<int64_t>();
  c.hidden_layers = j.at("hidden_layers").get<int>();
  c.hidden_width = j.at("hidden_width").get<size_t>();
  c.rng_seed = j.at("rng_seed").get<uint64_t>();
  auto opt = ParseOptimizer(j.at("optimizer").get<std::string>());
  if (!opt) throw ParseError("model config: unknown optimizer");
  c.optimizer = *opt;
  return c;
}

}  // namespace

MLPParams MLPParams::ZerosLike() const {
  MLPParams z;
  for (const DenseLayer &l : layers) {
    z.layers.push_back({Matrix(l.weights.rows, l.weights.cols),
                        std::vector<double>(l.bias.size(), 0.0)});
  }
  return z;
}

void MLPParams::Validate() const {
  if (layers.empty() || layers.size() > 2) {
    throw InvalidArgument("model must have one or two affine layers");
  }
  for (size_t l = 0; l < layers.size(); ++l) {
    const DenseLayer &layer = layers[l];
    if (layer.weights.data.size() != layer.weights.rows * layer.weights.cols ||
        layer.bias.size() != layer.weights.rows || layer.weights.rows == 0 ||
        layer.weights.cols == 0) {
      throw InvalidArgument("layer " + std::to_string(l) + " is malformed");
    }
    if (l > 0 && layer.weights.cols != layers[l - 1].weights.rows) {
      throw InvalidArgument("layer " + std::to_string(l) +
                            " input does not match previous output");
    }
  }
}

MLPParams InitParams(size_t input_dim, int hidden_layers, size_t hidden_width,
                     size_t num_classes, Rng &rng, double init_scale) {
  if (hidden_layers < 0 || hidden_layers > 1) {
    throw InvalidArgument("hidden_layers must be 0 or 1");
  }
  if (input_dim == 0 || num_classes == 0 || (hidden_layers == 1 && hidden_width == 0)) {
    throw InvalidArgument("layer dimensions must be positive");
  }
  std::vector<size_t> dims = {input_dim};
  if (hidden_layers == 1) dims.push_back(hidden_width);
  dims.push_back(num_classes);

  MLPParams params;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer layer{Matrix(dims[l + 1], dims[l]),
                     std::vector<double>(dims[l + 1])};
    for (double &w : layer.weights.data) w = rng.Uniform(-init_scale, init_scale);
    for (double &b : layer.bias) b = rng.Uniform(-init_scale, init_scale);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

std::vector<double> Softmax(std::span<const double> logits) {
  std::vector<double> probs(logits.begin(), logits.end());
  const double max = *std::max_element(probs.begin(), probs.end());
  double sum = 0.0;
  for (double &p : probs) {
    p = std::exp(p - max);
    sum += p;
  }
  for (double &p : probs) p /= sum;
  return probs;
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<double> Logits(const MLPParams &params, std::span<const double> x) {
  CheckInput(params, x);
  std::vector<double> out;
  if (params.layers.size() == 1) {
    Affine(params.layers[0], x, out);
    return out;
  }
  std::vector<double> hidden;
  Affine(params.layers[0], x, hidden);
  for (double &h : hidden) h = Sigmoid(h);
  Affine(params.layers[1], hidden, out);
  return out;
}

std::vector<double> Forward(const MLPParams &params, std::span<const double> x) {
  return Softmax(Logits(params, x));
}

double CrossEntropy(std::span<const double> probs, int gold) {
  if (gold < 0 || static_cast<size_t>(gold) >= probs.size()) {
    throw InvalidArgument("gold label " + std::to_string(gold) + " out of range");
  }
  return -std::log(std::max(probs[static_cast<size_t>(gold)], kProbabilityFloor));
}

GradientResult ComputeGradients(const MLPParams &params,
                                std::span<const Example> batch) {
  if (batch.empty()) throw InvalidArgument("gradient of an empty batch");
  GradientResult result{params.ZerosLike(), 0.0};
  const double scale = 1.0 / static_cast<double>(batch.size());
  const bool has_hidden = params.layers.size() == 2;
  const DenseLayer &out_layer = params.layers.back();
  DenseLayer &g_out = result.gradient.layers.back();
  const size_t k = out_layer.weights.rows;

  std::vector<double> hidden;
  std::vector<double> logits;
  std::vector<double> delta(k);
  std::vector<double> hidden_delta;
  for (const Example &ex : batch) {
    CheckInput(params, ex.features);
    std::span<const double> top_input = ex.features;
    if (has_hidden) {
      Affine(params.layers[0], ex.features, hidden);
      for (double &h : hidden) h = Sigmoid(h);
      top_input = hidden;
    }
    Affine(out_layer, top_input, logits);
    std::vector<double> probs = Softmax(logits);
    result.loss += CrossEntropy(probs, ex.label) * scale;

    // d(loss)/d(logits) = probs - onehot(gold), averaged over the batch.
    for (size_t c = 0; c < k; ++c) {
      delta[c] = (probs[c] - (static_cast<int>(c) == ex.label ? 1.0 : 0.0)) * scale;
    }
    for (size_t c = 0; c < k; ++c) {
      g_out.bias[c] += delta[c];
      double *grow = &g_out.weights.data[c * g_out.weights.cols];
      for (size_t i = 0; i < top_input.size(); ++i) grow[i] += delta[c] * top_input[i];
    }
    if (!has_hidden) continue;

    const size_t h = hidden.size();
    hidden_delta.assign(h, 0.0);
    for (size_t c = 0; c < k; ++c) {
      const double *wrow = &out_layer.weights.data[c * h];
      for (size_t i = 0; i < h; ++i) hidden_delta[i] += wrow[i] * delta[c];
    }
    DenseLayer &g_in = result.gradient.layers[0];
    const size_t d = ex.features.size();
    for (size_t i = 0; i < h; ++i) {
      const double dz = hidden_delta[i] * hidden[i] * (1.0 - hidden[i]);
      g_in.bias[i] += dz;
      double *grow = &g_in.weights.data[i * d];
      for (size_t j = 0; j < d; ++j) grow[j] += dz * ex.features[j];
    }
  }
  return result;
}

double MeanLoss(const MLPParams &params, std::span<const Example> batch) {
  if (batch.empty()) return 0.0;
  double loss = 0.0;
  for (const Example &ex : batch) loss += CrossEntropy(Forward(params, ex.features), ex.label);
  return loss / static_cast<double>(batch.size());
}

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be positive");
  if (max_epochs < 1) throw InvalidArgument("max_epochs must be at least 1");
  if (batch_size < 0) throw InvalidArgument("batch_size must be non-negative");
  if (context_width < 1) throw InvalidArgument("context_width must be positive");
  if (hidden_layers < 0 || hidden_layers > 1) {
    throw InvalidArgument("hidden_layers must be 0 or 1");
  }
  if (hidden_layers == 1 && hidden_width == 0) {
    throw InvalidArgument("hidden_width must be positive");
  }
}

Split MakeSplit(size_t n, const SplitSpec &spec) {
  if (spec.train < 0 || spec.dev < 0 || spec.test < 0 ||
      std::abs(spec.train + spec.dev + spec.test - 1.0) > 1e-9) {
    throw InvalidArgument("split fractions must be non-negative and sum to 1");
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(DeriveSeed(spec.seed, "split"));
  rng.Shuffle(order);
  const auto n_train = static_cast<size_t>(std::llround(spec.train * static_cast<double>(n)));
  auto n_dev = static_cast<size_t>(std::llround(spec.dev * static_cast<double>(n)));
  n_dev = std::min(n_dev, n - std::min(n, n_train));
  Split split;
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(n, n_train)));
  split.dev.assign(order.begin() + static_cast<std::ptrdiff_t>(split.train.size()),
                   order.begin() + static_cast<std::ptrdiff_t>(split.train.size() + n_dev));
  split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(split.train.size() + n_dev),
                    order.end());
  return split;
}

std::vector<Example> Dataset::Examples(std::span<const size_t> indices) const {
  std::vector<Example> examples;
  examples.reserve(indices.size());
  for (size_t i : indices) examples.push_back({features[i], labels[i]});
  return examples;
}

void Dataset::Validate() const {
  if (features.size() != labels.size() || ids.size() != labels.size()) {
    throw InvalidArgument("dataset columns have different lengths");
  }
  const size_t k = TaskLabels(task).size();
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<size_t>(labels[i]) >= k) {
      throw InvalidArgument("example '" + ids[i] + "' has a label outside the vocabulary");
    }
    if (features[i].size() != features.front().size()) {
      throw InvalidArgument("example '" + ids[i] + "' has inconsistent feature dimension");
    }
  }
}

Dataset BuildDataset(Task task, const std::vector<AnnotationRecord> &gold,
                     const std::vector<CandidatePair> &pairs,
                     const EmbeddingTable &table) {
  std::unordered_map<std::string, const CandidatePair *> by_id;
  for (const CandidatePair &p : pairs) by_id.emplace(p.pair_id, &p);
  std::vector<const AnnotationRecord *> records;
  for (const AnnotationRecord &r : gold) {
    if (r.Label(task)) records.push_back(&r);
  }
  std::sort(records.begin(), records.end(),
            [](const AnnotationRecord *a, const AnnotationRecord *b) {
              return a->pair_id < b->pair_id;
            });
  Dataset data;
  data.task = task;
  for (size_t i = 0; i < records.size(); ++i) {
    const AnnotationRecord &r = *records[i];
    if (i > 0 && records[i - 1]->pair_id == r.pair_id) {
      throw InvalidArgument("gold annotations repeat pair '" + r.pair_id +
                            "'; adjudicate first");
    }
    auto it = by_id.find(r.pair_id);
    if (it == by_id.end()) {
      throw InvalidArgument("annotated pair '" + r.pair_id + "' is not in the pair file");
    }
    data.ids.push_back(r.pair_id);
    data.features.push_back(PairFeatureFor(table, *it->second));
    data.labels.push_back(*r.Label(task));
  }
  return data;
}

TrainResult Train(const Dataset &data, const Split &split, const TrainConfig &config) {
  config.Validate();
  data.Validate();
  if (split.train.empty()) throw InvalidArgument("training split is empty");

  TrainResult result;
  const size_t k = TaskLabels(data.task).size();
  {
    std::vector<bool> seen(k, false);
    size_t distinct = 0;
    for (size_t i : split.train) {
      if (!seen[static_cast<size_t>(data.labels[i])]) {
        seen[static_cast<size_t>(data.labels[i])] = true;
        ++distinct;
      }
    }
    if (distinct < 2) {
      result.warnings.push_back("training split contains a single class");
    }
  }

  Rng init_rng(DeriveSeed(config.rng_seed, "init"));
  Rng shuffle_rng(DeriveSeed(config.rng_seed, "shuffle"));
  MLPParams params = InitParams(data.feature_dim(), config.hidden_layers,
                                config.hidden_width, k, init_rng);
  AdamState adam(params);

  const std::vector<Example> train_examples = data.Examples(split.train);
  result.initial_train_loss = MeanLoss(params, train_examples);

  std::vector<size_t> order = split.train;
  const size_t batch_size = config.batch_size == 0
                                ? order.size()
                                : static_cast<size_t>(config.batch_size);
  TrainedModel model{data.task, TaskLabels(data.task), {}, config};
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    shuffle_rng.Shuffle(order);
    for (size_t begin = 0; begin < order.size(); begin += batch_size) {
      const size_t end = std::min(order.size(), begin + batch_size);
      std::vector<Example> batch = data.Examples(
          std::span<const size_t>(order).subspan(begin, end - begin));
      GradientResult g = ComputeGradients(params, batch);
      if (config.optimizer == Optimizer::kAdam) {
        adam.Step(params, g.gradient, config.learning_rate);
      } else {
        const double lr = config.learning_rate;
        ForEachParam(params, g.gradient, [lr](double &p, double gp) { p -= lr * gp; });
      }
    }
    result.train_loss.push_back(MeanLoss(params, train_examples));
    model.params = params;
    result.dev_accuracy.push_back(
        split.dev.empty() ? 0.0 : ModelAccuracy(model, data, split.dev));
  }
  result.model = std::move(model);
  return result;
}

int Argmax(std::span<const double> values) {
  int best = 0;
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[static_cast<size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

Prediction Predict(const TrainedModel &model, std::span<const double> x) {
  Prediction p;
  p.probs = Forward(model.params, x);
  p.label = Argmax(p.probs);
  return p;
}

double ModelAccuracy(const TrainedModel &model, const Dataset &data,
                     std::span<const size_t> indices) {
  if (indices.empty()) return 0.0;
  size_t correct = 0;
  for (size_t i : indices) {
    if (Predict(model, data.features[i]).label == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

GridResult GridSearch(const std::map<int64_t, Dataset> &by_width,
                      const Split &split, const TrainConfig &base,
                      const Grid &grid) {
  if (grid.epochs.empty() || grid.hidden_layers.empty() || grid.context_widths.empty()) {
    throw InvalidArgument("hyperparameter grid has an empty axis");
  }
  const Dataset *reference = nullptr;
  for (int64_t width : grid.context_widths) {
    auto it = by_width.find(width);
    if (it == by_width.end()) {
      throw InvalidArgument("missing embeddings for context width " + std::to_string(width));
    }
    if (reference == nullptr) {
      reference = &it->second;
    } else if (it->second.ids != reference->ids || it->second.labels != reference->labels) {
      throw InvalidArgument("dataset for width " + std::to_string(width) +
                            " does not hold the same examples");
    }
  }
  const int max_epochs = *std::max_element(grid.epochs.begin(), grid.epochs.end());

  GridResult result;
  for (int64_t width : grid.context_widths) {
    for (int layers : grid.hidden_layers) {
      TrainConfig config = base;
      config.context_width = width;
      config.hidden_layers = layers;
      config.max_epochs = max_epochs;
      TrainResult run = Train(by_width.at(width), split, config);
      for (int e : grid.epochs) {
        result.points.push_back({width, layers, e,
                                 run.dev_accuracy[static_cast<size_t>(e - 1)]});
      }
    }
  }
  const GridPoint &best = *std::min_element(
      result.points.begin(), result.points.end(),
      [](const GridPoint &a, const GridPoint &b) {
        return std::make_tuple(-a.dev_accuracy, a.epochs, a.hidden_layers, a.context_width) <
               std::make_tuple(-b.dev_accuracy, b.epochs, b.hidden_layers, b.context_width);
      });
  result.best_config = base;
  result.best_config.context_width = best.context_width;
  result.best_config.hidden_layers = best.hidden_layers;
  result.best_config.max_epochs = best.epochs;
  result.best_dev_accuracy = best.dev_accuracy;
  result.best_model = Train(by_width.at(best.context_width), split, result.best_config).model;
  return result;
}

std::string_view OptimizerName(Optimizer o) {
  return o == Optimizer::kAdam ? "adam" : "sgd";
}

std::optional<Optimizer> ParseOptimizer(std::string_view name) {
  if (name == "sgd") return Optimizer::kSgd;
  if (name == "adam") return Optimizer::kAdam;
  return std::nullopt;
}

std::string SerializeModel(const TrainedModel &model) {
  model.params.Validate();
  json j;
  j["task"] = std::string(TaskName(model.task));
  j["label_vocab"] = model.labels;
  j["dims"] = {{"input", model.params.input_dim()},
               {"hidden", model.params.hidden_width()},
               {"output", model.params.output_dim()}};
  j["hidden_layers"] = model.params.hidden_layers();
  j["hidden_width"] = model.params.hidden_width();
  json layers = json::array();
  for (const DenseLayer &layer : model.params.layers) {
    json rows = json::array();
    for (size_t r = 0; r < layer.weights.rows; ++r) {
      auto row = layer.weights.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    layers.push_back({{"weight", std::move(rows)}, {"bias", layer.bias}});
  }
  j["weights"] = std::move(layers);
  j["config"] = ConfigJson(model.config);
  j["seed"] = model.config.rng_seed;
  return j.dump(1) + "\n";
}

TrainedModel ParseModel(std::string_view text) {
  TrainedModel model;
  try {
    json j = json::parse(text);
    auto task = ParseTask(j.at("task").get<std::string>());
    if (!task) throw ParseError("model: unknown task");
    model.task = *task;
    model.labels = j.at("label_vocab").get<std::vector<std::string>>();
    for (const json &lj : j.at("weights")) {
      DenseLayer layer;
      const json &rows = lj.at("weight");
      layer.weights.rows = rows.size();
      layer.weights.cols = rows.empty() ? 0 : rows.front().size();
      for (const json &row : rows) {
        if (row.size() != layer.weights.cols) throw ParseError("model: ragged weight matrix");
        for (const json &v : row) layer.weights.data.push_back(v.get<double>());
      }
      layer.bias = lj.at("bias").get<std::vector<double>>();
      model.params.layers.push_back(std::move(layer));
    }
    model.config = ConfigFromJson(j.at("config"));
    model.params.Validate();
    if (model.labels != TaskLabels(model.task)) {
      throw ParseError("model: label_vocab does not match task " +
                       std::string(TaskName(model.task)));
    }
    if (model.params.output_dim() != model.labels.size() ||
        model.params.input_dim() != j.at("dims").at("input").get<size_t>() ||
        model.params.hidden_layers() != j.at("hidden_layers").get<int>()) {
      throw ParseError("model: dims do not match weights");
    }
  } catch (const json::exception &e) {
    throw ParseError(std::string("model: ") + e.what());
  } catch (const InvalidArgument &e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  return model;
}

TrainedModel LoadModel(const std::string &path) { return ParseModel(ReadFile(path)); }

void SaveModel(const std::string &path, const TrainedModel &model) {
  WriteFileAtomic(path, SerializeModel(model));
}

}  // namespace grounding
