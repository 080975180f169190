/*
 * Copyright 2026 The ANDOR Bench Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ANDOR_SURROGATE_HPP
#define ANDOR_SURROGATE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "andor/common.hpp"
#include "andor/dataset.hpp"
#include "andor/masked_dataset.hpp"
#include "json.hpp"

namespace andor {

using ClassProbabilities = std::array<double, 2>;
using ProbabilityFn = std::function<ClassProbabilities(std::span<const double>)>;

// Larger probability wins; ties go to class 0.
inline int argmax_class(const ClassProbabilities& p) { return p[1] > p[0] ? 1 : 0; }

struct TrainConfig {
  std::vector<int> hidden = {16, 16};
  double learning_rate = 0.5;
  double momentum = 0.9;
  int max_epochs = 4000;
  // Training stops once train accuracy is 100% and mean loss is below this.
  double loss_tolerance = 0.02;
  std::uint64_t seed = 0;

  void validate() const {
    require(learning_rate > 0, "learning rate must be positive");
    require(momentum >= 0 && momentum < 1, "momentum must lie in [0, 1)");
    require(max_epochs >= 0, "max epochs must be non-negative");
    require(loss_tolerance > 0, "loss tolerance must be positive");
    for (int h : hidden) require(h >= 1, "hidden layer sizes must be positive");
  }
};

struct TrainingOutcome {
  bool trained = false;
  int epochs_run = 0;
  double train_accuracy = 0.0;
  double train_loss = 0.0;
  double val_accuracy = 0.0;
  bool reached_full_accuracy = false;
};

struct DenseLayer {
  int inputs = 0;
  int outputs = 0;
  std::vector<double> weights;  // outputs x inputs, row-major
  std::vector<double> bias;

  bool operator==(const DenseLayer&) const = default;
};

// Multilayer perceptron with tanh hidden units and a softmax pair output.
class MlpModel {
 public:
  MlpModel() = default;

  static MlpModel initialize(int input_length, const std::vector<int>& hidden,
                             std::uint64_t seed) {
    require(input_length >= 1, "input length must be positive");
    MlpModel m;
    m.seed_ = seed;
    std::mt19937_64 gen(rng::derive(seed, "mlp-init"));
    int in = input_length;
    std::vector<int> sizes = hidden;
    sizes.push_back(2);
    for (int out : sizes) {
      DenseLayer layer{in, out, std::vector<double>(static_cast<std::size_t>(in) * out),
                       std::vector<double>(out, 0.0)};
      const double limit = std::sqrt(6.0 / (in + out));
      for (auto& w : layer.weights) w = rng::uniform(gen, -limit, limit);
      m.layers_.push_back(std::move(layer));
      in = out;
    }
    return m;
  }

  int input_length() const { return layers_.empty() ? 0 : layers_.front().inputs; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& mutable_layers() { return layers_; }
  const TrainingOutcome& outcome() const { return outcome_; }
  void set_outcome(const TrainingOutcome& o) { outcome_ = o; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  std::vector<int> layer_sizes() const {
    std::vector<int> sizes;
    if (layers_.empty()) return sizes;
    sizes.push_back(layers_.front().inputs);
    for (const auto& l : layers_) sizes.push_back(l.outputs);
    return sizes;
  }

  ClassProbabilities probabilities(std::span<const double> x) const {
    check_length(x);
    std::vector<std::vector<double>> acts;
    forward(x, acts);
    return {acts.back()[0], acts.back()[1]};
  }

  int predict_class(std::span<const double> x) const {
    return argmax_class(probabilities(x));
  }

  // d p(cls | x) / d x.
  std::vector<double> input_gradient(std::span<const double> x, int cls) const {
    check_length(x);
    require(cls == 0 || cls == 1, "class must be 0 or 1");
    std::vector<std::vector<double>> acts;
    forward(x, acts);
    const auto& p = acts.back();
    // Softmax Jacobian row for the chosen class.
    std::vector<double> delta = {p[cls] * ((cls == 0 ? 1.0 : 0.0) - p[0]),
                                 p[cls] * ((cls == 1 ? 1.0 : 0.0) - p[1])};
    for (std::size_t li = layers_.size(); li-- > 0;) {
      const DenseLayer& layer = layers_[li];
      std::vector<double> back(layer.inputs, 0.0);
      for (int o = 0; o < layer.outputs; ++o) {
        const double* row = &layer.weights[static_cast<std::size_t>(o) * layer.inputs];
        for (int i = 0; i < layer.inputs; ++i) back[i] += row[i] * delta[o];
      }
      if (li > 0) {
        const auto& a = acts[li];  // tanh output feeding this layer
        for (int i = 0; i < layer.inputs; ++i) back[i] *= 1.0 - a[i] * a[i];
      }
      delta = std::move(back);
    }
    return delta;
  }

  ProbabilityFn as_function() const {
    return [model = *this](std::span<const double> x) { return model.probabilities(x); };
  }

  // acts[0] = x, acts[k] = output of layer k-1 (softmax for the last).
  void forward(std::span<const double> x, std::vector<std::vector<double>>& acts) const {
    acts.assign(layers_.size() + 1, {});
    acts[0].assign(x.begin(), x.end());
    for (std::size_t li = 0; li < layers_.size(); ++li) {
      const DenseLayer& layer = layers_[li];
      const auto& in = acts[li];
      auto& out = acts[li + 1];
      out.assign(layer.outputs, 0.0);
      for (int o = 0; o < layer.outputs; ++o) {
        const double* row = &layer.weights[static_cast<std::size_t>(o) * layer.inputs];
        double z = layer.bias[o];
        for (int i = 0; i < layer.inputs; ++i) z += row[i] * in[i];
        out[o] = z;
      }
      if (li + 1 < layers_.size()) {
        for (auto& v : out) v = std::tanh(v);
      } else {
        const double top = *std::max_element(out.begin(), out.end());
        double total = 0.0;
        for (auto& v : out) {
          v = std::exp(v - top);
          total += v;
        }
        for (auto& v : out) v /= total;
      }
    }
  }

  bool operator==(const MlpModel& o) const { return layers_ == o.layers_ && seed_ == o.seed_; }

 private:
  void check_length(std::span<const double> x) const {
    require(static_cast<int>(x.size()) == input_length(),
            "input length " + std::to_string(x.size()) + " != model input length " +
                std::to_string(input_length()));
  }

  std::vector<DenseLayer> layers_;
  std::uint64_t seed_ = 0;
  TrainingOutcome outcome_;
};

inline double accuracy(const MlpModel& model, const FeatureTable& table) {
  if (table.size() == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    hits += model.predict_class(table.inputs[i]) == table.labels[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(table.size());
}

namespace detail {

// Rows sorted by (inputs, label) so that full-batch sums do not depend on
// the order the caller supplied.
inline std::vector<std::size_t> canonical_order(const FeatureTable& t) {
  std::vector<std::size_t> order(t.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&t](std::size_t a, std::size_t b) {
    if (t.inputs[a] != t.inputs[b]) return t.inputs[a] < t.inputs[b];
    return t.labels[a] < t.labels[b];
  });
  return order;
}

}  // namespace detail

// Full-batch gradient descent with momentum on mean cross-entropy.
inline MlpModel train_features(const TrainConfig& config, const FeatureTable& train,
                               const FeatureTable& val) {
  config.validate();
  require(train.size() > 0, "empty training set");
  const int l = static_cast<int>(train.inputs.front().size());
  MlpModel model = MlpModel::initialize(l, config.hidden, config.seed);
  TrainingOutcome outcome;
  if (config.max_epochs == 0) {
    outcome.train_accuracy = accuracy(model, train);
    outcome.val_accuracy = val.size() ? accuracy(model, val) : 0.0;
    model.set_outcome(outcome);
    return model;
  }

  const auto order = detail::canonical_order(train);
  auto& layers = model.mutable_layers();
  std::vector<DenseLayer> grads = layers;
  std::vector<DenseLayer> velocity = layers;
  for (auto& v : velocity) {
    std::fill(v.weights.begin(), v.weights.end(), 0.0);
    std::fill(v.bias.begin(), v.bias.end(), 0.0);
  }
  std::vector<std::vector<double>> acts;
  const double inv_n = 1.0 / static_cast<double>(train.size());

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    for (auto& g : grads) {
      std::fill(g.weights.begin(), g.weights.end(), 0.0);
      std::fill(g.bias.begin(), g.bias.end(), 0.0);
    }
    double loss = 0.0;
    std::size_t hits = 0;
    for (std::size_t idx : order) {
      const int y = train.labels[idx];
      model.forward(train.inputs[idx], acts);
      const auto& p = acts.back();
      loss -= std::log(std::max(p[y], 1e-300));
      hits += argmax_class({p[0], p[1]}) == y ? 1 : 0;
      std::vector<double> delta = {p[0] - (y == 0 ? 1.0 : 0.0), p[1] - (y == 1 ? 1.0 : 0.0)};
      for (std::size_t li = layers.size(); li-- > 0;) {
        const DenseLayer& layer = layers[li];
        DenseLayer& g = grads[li];
        const auto& in = acts[li];
        std::vector<double> back(li > 0 ? layer.inputs : 0, 0.0);
        for (int o = 0; o < layer.outputs; ++o) {
          const std::size_t row = static_cast<std::size_t>(o) * layer.inputs;
          g.bias[o] += delta[o];
          for (int i = 0; i < layer.inputs; ++i) {
            g.weights[row + i] += delta[o] * in[i];
            if (li > 0) back[i] += layer.weights[row + i] * delta[o];
          }
        }
        if (li > 0) {
          for (int i = 0; i < layer.inputs; ++i) back[i] *= 1.0 - in[i] * in[i];
        }
        delta = std::move(back);
      }
    }
    loss *= inv_n;
    if (!std::isfinite(loss)) {
      throw DivergenceError("training diverged at epoch " + std::to_string(epoch), epoch);
    }
    outcome.epochs_run = epoch;
    outcome.train_loss = loss;
    outcome.train_accuracy = static_cast<double>(hits) * inv_n;
    if (hits == train.size() && loss < config.loss_tolerance) break;
    bool finite = true;
    for (std::size_t li = 0; li < layers.size(); ++li) {
      auto step = [&](std::vector<double>& w, std::vector<double>& v,
                      const std::vector<double>& g) {
        for (std::size_t k = 0; k < w.size(); ++k) {
          v[k] = config.momentum * v[k] - config.learning_rate * inv_n * g[k];
          w[k] += v[k];
          finite = finite && std::isfinite(w[k]);
        }
      };
      step(layers[li].weights, velocity[li].weights, grads[li].weights);
      step(layers[li].bias, velocity[li].bias, grads[li].bias);
    }
    if (!finite) {
      throw DivergenceError("non-finite weights after epoch " + std::to_string(epoch), epoch);
    }
    outcome.epochs_run = epoch + 1;
  }
  outcome.trained = true;
  outcome.train_accuracy = accuracy(model, train);
  outcome.reached_full_accuracy = outcome.train_accuracy == 1.0;
  outcome.val_accuracy = val.size() ? accuracy(model, val) : 0.0;
  model.set_outcome(outcome);
  return model;
}

inline MlpModel train(const TrainConfig& config, const Dataset& train_set,
                      const Dataset& val_set) {
  return train_features(config, FeatureTable::from(train_set), FeatureTable::from(val_set));
}

// Seeded oversampling of a feature table (minority rows duplicated).
inline FeatureTable balance_features(const FeatureTable& t, std::uint64_t seed) {
  std::array<std::vector<std::size_t>, 2> members;
  for (std::size_t i = 0; i < t.size(); ++i) members[t.labels[i]].push_back(i);
  for (int c = 0; c < 2; ++c) {
    require(!members[c].empty(),
            "cannot balance: class " + std::to_string(c) + " absent from train");
  }
  FeatureTable out = t;
  const std::size_t target = std::max(members[0].size(), members[1].size());
  std::mt19937_64 gen(rng::derive(seed, "oversample"));
  for (int c = 0; c < 2; ++c) {
    for (std::size_t k = members[c].size(); k < target; ++k) {
      const std::size_t pick = members[c][rng::below(gen, members[c].size())];
      out.inputs.push_back(t.inputs[pick]);
      out.labels.push_back(c);
    }
  }
  return out;
}

// ROAR retraining: fresh initialization from a separate seed stream.
inline MlpModel retrain_on_masked(const TrainConfig& config, const MaskedDataset& train_set,
                                  const MaskedDataset& val_set) {
  TrainConfig fresh = config;
  fresh.seed = rng::derive(config.seed, "retrain");
  return train_features(fresh, train_set.features(), val_set.features());
}

// Exact logic predictor: evaluates the formula, treating values outside the
// positive set (including any fill value) as negative inputs.
class LogicPredictor {
 public:
  explicit LogicPredictor(const DatasetConfig& config) : config_(config), formula_(config) {}

  int predict_class(std::span<const double> x) const {
    require(static_cast<int>(x.size()) == formula_.layout().length, "input length mismatch");
    std::vector<std::uint8_t> codes(x.size(), kNegative);
    for (std::size_t j = 0; j < x.size(); ++j) {
      for (std::size_t k = 0; k < config_.domain.size(); ++k) {
        if (std::abs(config_.domain[k].to_double() - x[j]) < 1e-9) {
          codes[j] = static_cast<std::uint8_t>(k);
        }
      }
      if (codes[j] == kNegative) codes[j] = first_negative();
    }
    return formula_.eval_codes(codes);
  }

  ClassProbabilities probabilities(std::span<const double> x) const {
    return predict_class(x) == 1 ? ClassProbabilities{0.0, 1.0} : ClassProbabilities{1.0, 0.0};
  }

  ProbabilityFn as_function() const {
    return [self = *this](std::span<const double> x) { return self.probabilities(x); };
  }

 private:
  static constexpr std::uint8_t kNegative = 0xFF;
  std::uint8_t first_negative() const {
    for (std::size_t k = 0; k < config_.domain.size(); ++k) {
      if (!config_.is_positive(config_.domain[k])) return static_cast<std::uint8_t>(k);
    }
    return 0;
  }

  DatasetConfig config_;
  Formula formula_;
};

inline constexpr std::string_view kModelFormat = "andor-mlp/1";

inline std::string serialize_model(const MlpModel& m) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : m.layers()) {
    nlohmann::json w = nlohmann::json::array();
    for (double v : l.weights) w.push_back(format_double(v));
    nlohmann::json b = nlohmann::json::array();
    for (double v : l.bias) b.push_back(format_double(v));
    layers.push_back({{"inputs", l.inputs}, {"outputs", l.outputs}, {"weights", w}, {"bias", b}});
  }
  const auto& o = m.outcome();
  nlohmann::json doc = {
      {"format", std::string(kModelFormat)},
      {"layer_sizes", m.layer_sizes()},
      {"seed", m.seed()},
      {"layers", layers},
      {"metadata",
       {{"trained", o.trained},
        {"epochs_run", o.epochs_run},
        {"train_accuracy", format_double(o.train_accuracy)},
        {"train_loss", format_double(o.train_loss)},
        {"val_accuracy", format_double(o.val_accuracy)},
        {"reached_full_accuracy", o.reached_full_accuracy}}}};
  return doc.dump(1) + "\n";
}

inline MlpModel parse_model(const std::string& text) {
  try {
    auto doc = nlohmann::json::parse(text);
    require(doc.at("format").get<std::string>() == kModelFormat,
            "unknown model format '" + doc.at("format").get<std::string>() + "'");
    MlpModel m;
    m.set_seed(doc.at("seed").get<std::uint64_t>());
    auto number = [](const nlohmann::json& v) { return std::stod(v.get<std::string>()); };
    for (const auto& l : doc.at("layers")) {
      DenseLayer layer;
      layer.inputs = l.at("inputs").get<int>();
      layer.outputs = l.at("outputs").get<int>();
      for (const auto& v : l.at("weights")) layer.weights.push_back(number(v));
      for (const auto& v : l.at("bias")) layer.bias.push_back(number(v));
      require(layer.weights.size() == static_cast<std::size_t>(layer.inputs) * layer.outputs &&
                  layer.bias.size() == static_cast<std::size_t>(layer.outputs),
              "model layer shape mismatch");
      m.mutable_layers().push_back(std::move(layer));
    }
    const auto& md = doc.at("metadata");
    TrainingOutcome o;
    o.trained = md.at("trained").get<bool>();
    o.epochs_run = md.at("epochs_run").get<int>();
    o.train_accuracy = number(md.at("train_accuracy"));
    o.train_loss = number(md.at("train_loss"));
    o.val_accuracy = number(md.at("val_accuracy"));
    o.reached_full_accuracy = md.at("reached_full_accuracy").get<bool>();
    m.set_outcome(o);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace andor

#endif  // ANDOR_SURROGATE_HPP
