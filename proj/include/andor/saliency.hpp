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

#ifndef ANDOR_SALIENCY_HPP
#define ANDOR_SALIENCY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <bit>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "andor/common.hpp"
#include "andor/dataset.hpp"
#include "andor/ground_truth.hpp"
#include "andor/surrogate.hpp"

namespace andor {

// Policy for negative scores. Applied at most once per tensor.
enum class InterpretationMode : std::uint8_t { kAsIs, kCutoff, kAbsolute };

inline std::string_view to_string(InterpretationMode mode) {
  switch (mode) {
    case InterpretationMode::kAsIs: return "AsIs";
    case InterpretationMode::kCutoff: return "Cutoff";
    case InterpretationMode::kAbsolute: return "Absolute";
  }
  return "?";
}

inline InterpretationMode parse_interpretation_mode(std::string_view text) {
  if (text == "AsIs") return InterpretationMode::kAsIs;
  if (text == "Cutoff") return InterpretationMode::kCutoff;
  if (text == "Absolute") return InterpretationMode::kAbsolute;
  throw ValidationError("unknown interpretation mode '" + std::string(text) + "'");
}

inline double interpret_score(InterpretationMode mode, double score) {
  switch (mode) {
    case InterpretationMode::kAsIs: return score;
    case InterpretationMode::kCutoff: return std::max(score, 0.0);
    case InterpretationMode::kAbsolute: return std::abs(score);
  }
  return score;
}

// Best-performing mode per attribution method, by method name.
inline const std::map<std::string, InterpretationMode, std::less<>>& method_presets() {
  using M = InterpretationMode;
  static const std::map<std::string, InterpretationMode, std::less<>> kPresets = {
      {"LRP-Full", M::kCutoff},
      {"LRP-Rollout", M::kAsIs},
      {"LRP-Transformer", M::kAsIs},
      {"LRP-Transformer CLS", M::kAsIs},
      {"Attention", M::kAsIs},
      {"IntegratedGradients", M::kAbsolute},
      {"DeepLift", M::kCutoff},
      {"Deconvolution", M::kAbsolute},
      {"GradCam", M::kAsIs},
      {"GradCAM", M::kAsIs},
      {"GuidedGradCam", M::kAbsolute},
      {"GradCam++", M::kAsIs},
      {"GradCAM++", M::kAsIs},
      {"KernelSHAP", M::kCutoff},
      {"FeaturePermutation", M::kCutoff},
      {"SHAP-IQ", M::kAsIs},
      {"IQ-SHAP", M::kAsIs},
  };
  return kPresets;
}

inline std::optional<InterpretationMode> preset_mode(std::string_view method) {
  const auto& presets = method_presets();
  auto it = presets.find(method);
  if (it == presets.end()) return std::nullopt;
  return it->second;
}

// Per-sample attribution scores for one dataset split. Order 1 rows hold l
// scores; order 2 rows hold an l x l row-major matrix.
struct SaliencyTensor {
  std::string method;
  int order = 1;
  InterpretationMode mode = InterpretationMode::kAsIs;
  // True until an interpretation mode has been applied.
  bool raw = true;
  std::string dataset_name;
  std::string dataset_hash;
  SplitTag split = SplitTag::kFull;
  int length = 0;
  std::vector<std::int64_t> ids;
  std::vector<std::vector<double>> scores;

  std::size_t size() const { return ids.size(); }
  std::size_t row_size() const {
    return order == 1 ? static_cast<std::size_t>(length)
                      : static_cast<std::size_t>(length) * length;
  }

  void validate() const {
    require(order == 1 || order == 2, "saliency order must be 1 or 2");
    require(length >= 1, "saliency length must be positive");
    require(ids.size() == scores.size(), "saliency ids and rows differ in count");
    for (std::size_t i = 0; i < scores.size(); ++i) {
      require(scores[i].size() == row_size(),
              "sample " + std::to_string(ids[i]) + " has " + std::to_string(scores[i].size()) +
                  " scores, expected " + std::to_string(row_size()));
      for (double v : scores[i]) {
        require(std::isfinite(v), "non-finite score for sample " + std::to_string(ids[i]));
      }
    }
  }

  bool operator==(const SaliencyTensor&) const = default;
};

inline SaliencyTensor apply_interpretation_mode(const SaliencyTensor& t, InterpretationMode mode) {
  require(t.raw, "interpretation mode already applied (" + std::string(to_string(t.mode)) + ")");
  SaliencyTensor out = t;
  out.mode = mode;
  out.raw = false;
  for (auto& row : out.scores) {
    for (auto& v : row) v = interpret_score(mode, v);
  }
  return out;
}

// Every row of the matrix repeats the vector: M[i][j] = v[j].
inline std::vector<double> upscale_row(std::span<const double> v) {
  std::vector<double> m;
  m.reserve(v.size() * v.size());
  for (std::size_t i = 0; i < v.size(); ++i) m.insert(m.end(), v.begin(), v.end());
  return m;
}

inline std::vector<double> reduce_row(std::span<const double> m, int length) {
  std::vector<double> v(length);
  for (int i = 0; i < length; ++i) {
    const auto* row = m.data() + static_cast<std::size_t>(i) * length;
    v[i] = *std::max_element(row, row + length);
  }
  return v;
}

inline SaliencyTensor upscale_1d_to_2d(const SaliencyTensor& t) {
  require(t.order == 1, "upscaling needs an order-1 tensor");
  SaliencyTensor out = t;
  out.order = 2;
  for (auto& row : out.scores) row = upscale_row(row);
  return out;
}

// Row-wise maximum.
inline SaliencyTensor reduce_2d_to_1d(const SaliencyTensor& t) {
  require(t.order == 2, "reduction needs an order-2 tensor");
  SaliencyTensor out = t;
  out.order = 1;
  for (auto& row : out.scores) row = reduce_row(row, t.length);
  return out;
}

inline constexpr int kShapleyMaxLength = 14;
inline constexpr std::uint64_t kShapleyTableBudget = 1ULL << 24;

// Exact Shapley values with marginal imputation: v(S) is the mean class
// probability over all dataset samples agreeing with the explained sample
// on S. Sums and counts are tabulated once for every partial assignment
// (each position either a domain index or free), so each sample costs
// O(2^l * l).
class ShapleyExplainer {
 public:
  ShapleyExplainer(const Dataset& dataset, const ProbabilityFn& fn) {
    length_ = dataset.length();
    base_ = static_cast<int>(dataset.config.domain.size()) + 1;
    require(length_ <= kShapleyMaxLength,
            "exact Shapley needs l <= " + std::to_string(kShapleyMaxLength) + ", got " +
                std::to_string(length_));
    const std::uint64_t cells = checked_power(base_, length_, kShapleyTableBudget);
    if (cells > kShapleyTableBudget) {
      throw BudgetError("exact Shapley table exceeds budget", cells);
    }
    stride_.assign(length_, 1);
    for (int j = length_ - 2; j >= 0; --j) stride_[j] = stride_[j + 1] * base_;
    sum1_.assign(cells, 0.0);
    count_.assign(cells, 0.0);
    for (const auto& s : dataset.samples) {
      const std::size_t idx = index_of(s.codes);
      sum1_[idx] += fn(dataset.inputs(s))[1];
      count_[idx] += 1.0;
    }
    // Fold each position's values into its "free" slot.
    const int free = base_ - 1;
    for (int j = 0; j < length_; ++j) {
      for (std::size_t idx = 0; idx < cells; ++idx) {
        if ((idx / stride_[j]) % base_ != static_cast<std::size_t>(free)) continue;
        const std::size_t anchor = idx - free * stride_[j];
        for (int v = 0; v < free; ++v) {
          sum1_[idx] += sum1_[anchor + v * stride_[j]];
          count_[idx] += count_[anchor + v * stride_[j]];
        }
      }
    }
    weights_.assign(length_, 0.0);
    for (int k = 0; k < length_; ++k) {
      // k! (l-k-1)! / l!
      double w = 1.0 / length_;
      for (int i = 1; i <= k; ++i) w *= static_cast<double>(i) / (length_ - i);
      weights_[k] = w;
    }
  }

  int length() const { return length_; }

  // v(S) for every coalition S (bit j = position j).
  std::vector<double> coalition_values(const Sample& sample, int cls) const {
    require(static_cast<int>(sample.codes.size()) == length_, "sample length mismatch");
    const std::size_t n = std::size_t{1} << length_;
    std::vector<std::size_t> idx(n);
    const int free = base_ - 1;
    std::size_t all_free = 0;
    for (int j = 0; j < length_; ++j) all_free += free * stride_[j];
    idx[0] = all_free;
    std::vector<double> v(n);
    for (std::size_t s = 0; s < n; ++s) {
      if (s > 0) {
        const int j = std::countr_zero(s);
        idx[s] = idx[s & (s - 1)] - (free - sample.codes[j]) * stride_[j];
      }
      const double c = count_[idx[s]];
      require(c > 0, "sample " + std::to_string(sample.id) + " is not part of the explained data");
      const double p1 = sum1_[idx[s]] / c;
      v[s] = cls == 1 ? p1 : 1.0 - p1;
    }
    return v;
  }

  std::vector<double> explain(const Sample& sample, int cls) const {
    const auto v = coalition_values(sample, cls);
    std::vector<double> phi(length_, 0.0);
    for (std::size_t s = 0; s < v.size(); ++s) {
      const int k = std::popcount(s);
      for (int j = 0; j < length_; ++j) {
        if ((s >> j) & 1U) continue;
        phi[j] += weights_[k] * (v[s | (std::size_t{1} << j)] - v[s]);
      }
    }
    return phi;
  }

 private:
  std::size_t index_of(std::span<const std::uint8_t> codes) const {
    std::size_t idx = 0;
    for (int j = 0; j < length_; ++j) idx += codes[j] * stride_[j];
    return idx;
  }

  int length_ = 0;
  int base_ = 0;
  std::vector<std::size_t> stride_;
  std::vector<double> sum1_;
  std::vector<double> count_;
  std::vector<double> weights_;
};

inline std::vector<double> exact_shapley(const ProbabilityFn& fn, const Dataset& dataset,
                                         const Sample& sample, int cls) {
  return ShapleyExplainer(dataset, fn).explain(sample, cls);
}

// score_j = p(cls | x) - p(cls | x with x_j := fill)
inline std::vector<double> occlusion(const ProbabilityFn& fn, std::span<const double> x, int cls,
                                     double fill = 0.0) {
  const double full = fn(x)[cls];
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    probe[j] = fill;
    out[j] = full - fn(probe)[cls];
    probe[j] = x[j];
  }
  return out;
}

// Mean drop in correct-class probability when column j is permuted. Every
// column has its own seeded stream. One vector, shared by all samples.
inline std::vector<double> feature_permutation(const ProbabilityFn& fn, const FeatureTable& split,
                                               std::uint64_t seed) {
  require(split.size() >= 2, "feature permutation needs at least 2 samples");
  const std::size_t n = split.size();
  const std::size_t l = split.inputs.front().size();
  double base = 0.0;
  for (std::size_t i = 0; i < n; ++i) base += fn(split.inputs[i])[split.labels[i]];
  base /= static_cast<double>(n);
  std::vector<double> out(l, 0.0);
  for (std::size_t j = 0; j < l; ++j) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::mt19937_64 gen(rng::derive(seed, static_cast<std::uint64_t>(j)));
    rng::shuffle(perm, gen);
    double permuted = 0.0;
    std::vector<double> probe;
    for (std::size_t i = 0; i < n; ++i) {
      probe = split.inputs[i];
      probe[j] = split.inputs[perm[i]][j];
      permuted += fn(probe)[split.labels[i]];
    }
    out[j] = base - permuted / static_cast<double>(n);
  }
  return out;
}

struct IntegratedGradientsResult {
  std::vector<double> scores;
  // sum(scores) - (p(cls|x) - p(cls|baseline))
  double completeness_gap = 0.0;
};

// Midpoint Riemann sum along the straight path from the baseline.
inline IntegratedGradientsResult integrated_gradients(const MlpModel& model,
                                                      std::span<const double> x, int cls,
                                                      int steps = 64,
                                                      std::span<const double> baseline = {}) {
  require(steps >= 1, "integrated gradients needs at least one step");
  std::vector<double> b(x.size(), 0.0);
  if (!baseline.empty()) {
    require(baseline.size() == x.size(), "baseline length mismatch");
    b.assign(baseline.begin(), baseline.end());
  }
  std::vector<double> total(x.size(), 0.0);
  std::vector<double> point(x.size());
  for (int k = 0; k < steps; ++k) {
    const double alpha = (k + 0.5) / steps;
    for (std::size_t j = 0; j < x.size(); ++j) point[j] = b[j] + alpha * (x[j] - b[j]);
    const auto g = model.input_gradient(point, cls);
    for (std::size_t j = 0; j < x.size(); ++j) total[j] += g[j];
  }
  IntegratedGradientsResult out;
  out.scores.resize(x.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    out.scores[j] = total[j] / steps * (x[j] - b[j]);
    sum += out.scores[j];
  }
  out.completeness_gap = sum - (model.probabilities(x)[cls] - model.probabilities(b)[cls]);
  return out;
}

inline std::vector<double> gradient_x_input(const MlpModel& model, std::span<const double> x,
                                            int cls) {
  auto g = model.input_gradient(x, cls);
  for (std::size_t j = 0; j < x.size(); ++j) g[j] *= x[j];
  return g;
}

enum class OracleVariant : std::uint8_t { kMin, kMax };

// Score 1 on the lexicographically first minimum set (min) or on r_max
// (max), 0 elsewhere.
inline std::vector<double> oracle_saliency(const PrimeSets& truth, int length,
                                           OracleVariant variant) {
  const PositionSet chosen = variant == OracleVariant::kMin ? truth.first_min() : truth.r_max;
  std::vector<double> out(length, 0.0);
  for (int p : chosen.positions()) out[p] = 1.0;
  return out;
}

// i.i.d. uniform(0, 1), one stream per sample id.
inline std::vector<double> random_saliency(std::uint64_t seed, std::int64_t id, int length) {
  std::mt19937_64 gen(rng::derive(seed, static_cast<std::uint64_t>(id)));
  std::vector<double> out(length);
  for (auto& v : out) v = rng::uniform01(gen);
  return out;
}

// Negative control for the leakage metrics: no gate input is marked as
// relevant, while the first baseline position carries the label. Whatever
// survives masking of the gate inputs cannot explain the class; a retrained
// model can only recover it through the baseline.
inline std::vector<double> adversarial_encoder_saliency(const Layout& layout, int label) {
  std::vector<double> out(layout.length, 0.0);
  out[layout.baseline_begin] = label == 1 ? 1.0 : 0.0;
  return out;
}

// Names of the built-in attribution methods.
inline const std::vector<std::string>& builtin_methods() {
  static const std::vector<std::string> kMethods = {
      "Shapley",  "Occlusion",  "FeaturePermutation", "IntegratedGradients",
      "GradientXInput", "OracleMin", "OracleMax", "Random", "Adversarial"};
  return kMethods;
}

}  // namespace andor

#endif  // ANDOR_SALIENCY_HPP
