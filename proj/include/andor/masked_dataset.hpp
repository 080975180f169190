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

#ifndef ANDOR_MASKED_DATASET_HPP
#define ANDOR_MASKED_DATASET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "andor/common.hpp"
#include "andor/dataset.hpp"

namespace andor {

// Numeric design matrix with class labels; what the surrogate trains on.
struct FeatureTable {
  std::vector<std::vector<double>> inputs;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }

  static FeatureTable from(const Dataset& ds) {
    FeatureTable t;
    t.inputs.reserve(ds.size());
    t.labels.reserve(ds.size());
    for (const auto& s : ds.samples) {
      t.inputs.push_back(ds.inputs(s));
      t.labels.push_back(s.label);
    }
    return t;
  }
};

enum class ThresholdKind : std::uint8_t { kBaselineMax, kAverageFactor };

struct ThresholdRule {
  ThresholdKind kind = ThresholdKind::kBaselineMax;
  double factor = 1.0;

  static ThresholdRule baseline_max() { return {ThresholdKind::kBaselineMax, 1.0}; }
  static ThresholdRule average(double factor) {
    return {ThresholdKind::kAverageFactor, factor};
  }

  // "baseline", "t1.0", "t0.8", "t0.5"
  std::string name() const {
    if (kind == ThresholdKind::kBaselineMax) return "baseline";
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "t%.1f", factor);
    return buffer;
  }

  bool operator==(const ThresholdRule&) const = default;
};

struct MaskedSample {
  std::int64_t id = 0;
  int label = 0;
  PositionSet keep;
  // Kept positions hold their value, masked positions hold the fill value.
  std::vector<double> inputs;
};

// A split after LeRF masking. It never carries the unmasked values of
// masked positions, so anything trained on it cannot read them.
struct MaskedDataset {
  std::string dataset_name;
  Layout layout;
  double fill = 0.0;
  ThresholdRule rule;
  std::vector<MaskedSample> samples;

  std::size_t size() const { return samples.size(); }

  FeatureTable features() const {
    FeatureTable t;
    t.inputs.reserve(samples.size());
    t.labels.reserve(samples.size());
    for (const auto& s : samples) {
      t.inputs.push_back(s.inputs);
      t.labels.push_back(s.label);
    }
    return t;
  }
};

}  // namespace andor

#endif  // ANDOR_MASKED_DATASET_HPP
