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

#ifndef ANDOR_DATASET_HPP
#define ANDOR_DATASET_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "andor/common.hpp"
#include "andor/decimal.hpp"

namespace andor {

enum class GateType : std::uint8_t { kAnd, kOr, kXor };

inline std::string_view to_string(GateType type) {
  switch (type) {
    case GateType::kAnd: return "AND";
    case GateType::kOr: return "OR";
    case GateType::kXor: return "XOR";
  }
  return "?";
}

inline GateType parse_gate_type(std::string_view text) {
  if (text == "AND") return GateType::kAnd;
  if (text == "OR") return GateType::kOr;
  if (text == "XOR") return GateType::kXor;
  throw ValidationError("unknown gate type '" + std::string(text) + "'");
}

// Gate semantics over a count of positive inputs.
inline bool gate_value(GateType type, int positives, int inputs) {
  switch (type) {
    case GateType::kAnd: return positives == inputs;
    case GateType::kOr: return positives > 0;
    case GateType::kXor: return positives == 1;
  }
  return false;
}

struct BlockSpec {
  GateType gate_type = GateType::kAnd;
  int n_gates = 0;
  int gate_len = 1;

  bool operator==(const BlockSpec&) const = default;
};

struct DatasetConfig {
  std::string name;
  // At most one block per gate type, ordered AND, OR, XOR.
  std::vector<BlockSpec> blocks;
  int nr_baseline = 2;
  GateType top_level = GateType::kAnd;
  std::vector<Decimal> domain;
  std::vector<Decimal> positives;
  // The top-level gate reads raw inputs directly; blocks must be empty.
  bool single_gate = false;
  int top_gate_len = 0;

  bool operator==(const DatasetConfig&) const = default;

  int gate_input_count() const {
    if (single_gate) return top_gate_len;
    int n = 0;
    for (const auto& b : blocks) n += b.n_gates * b.gate_len;
    return n;
  }
  int length() const { return gate_input_count() + nr_baseline; }

  bool is_positive(Decimal value) const {
    return std::find(positives.begin(), positives.end(), value) !=
           positives.end();
  }

  // Index of `value` in the domain, or nullopt.
  std::optional<int> domain_index(Decimal value) const {
    auto it = std::find(domain.begin(), domain.end(), value);
    if (it == domain.end()) return std::nullopt;
    return static_cast<int>(it - domain.begin());
  }

  void validate() const {
    require(domain.size() >= 2, "config '" + name + "': domain needs >= 2 values");
    require(domain.size() <= 255, "config '" + name + "': domain too large");
    for (std::size_t i = 0; i < domain.size(); ++i) {
      require(domain[i] >= Decimal::parse("-1") && domain[i] <= Decimal::parse("1"),
              "config '" + name + "': domain value " + domain[i].to_string() +
                  " outside [-1, 1]");
      for (std::size_t j = 0; j < i; ++j) {
        require(domain[i] != domain[j], "config '" + name + "': duplicate domain value");
      }
    }
    require(!positives.empty(), "config '" + name + "': positive set is empty");
    for (std::size_t i = 0; i < positives.size(); ++i) {
      require(domain_index(positives[i]).has_value(),
              "config '" + name + "': positive value " +
                  positives[i].to_string() + " not in domain");
      for (std::size_t j = 0; j < i; ++j) {
        require(positives[i] != positives[j],
                "config '" + name + "': duplicate positive value");
      }
    }
    require(positives.size() < domain.size(),
            "config '" + name + "': positive set must be a proper subset of the domain");
    require(nr_baseline >= 1, "config '" + name + "': nr_baseline must be >= 1");
    int last_type = -1;
    for (const auto& b : blocks) {
      require(static_cast<int>(b.gate_type) > last_type,
              "config '" + name + "': blocks must be ordered AND, OR, XOR without repeats");
      last_type = static_cast<int>(b.gate_type);
      require(b.n_gates >= 0, "config '" + name + "': negative gate count");
      require(b.gate_len >= 1, "config '" + name + "': gate length must be >= 1");
    }
    if (single_gate) {
      for (const auto& b : blocks) {
        require(b.n_gates == 0, "config '" + name + "': single-gate config with gate blocks");
      }
      require(top_gate_len >= 1, "config '" + name + "': single gate needs inputs");
    } else {
      int gates = 0;
      for (const auto& b : blocks) gates += b.n_gates;
      require(gates >= 1, "config '" + name + "': no gates");
    }
    require(length() <= PositionSet::kMaxPositions,
            "config '" + name + "': length exceeds 64 positions");
  }
};

struct GateSpan {
  GateType type = GateType::kAnd;
  int begin = 0;
  int length = 0;

  PositionSet positions() const { return PositionSet::range(begin, length); }
  bool operator==(const GateSpan&) const = default;
};

// Position map. Gates in block order (AND, OR, XOR), baseline last. For a
// single-gate config the one span is the top-level gate itself.
struct Layout {
  std::vector<GateSpan> gates;
  int baseline_begin = 0;
  int nr_baseline = 0;
  int length = 0;
  bool single_gate = false;
  GateType top_level = GateType::kAnd;

  PositionSet baseline() const {
    return PositionSet::range(baseline_begin, nr_baseline);
  }
  PositionSet gate_positions() const {
    return PositionSet::range(0, baseline_begin);
  }
  bool is_baseline(int position) const { return position >= baseline_begin; }

  // Gate index owning `position`, or -1 for baseline positions.
  int gate_of(int position) const {
    for (std::size_t g = 0; g < gates.size(); ++g) {
      if (position >= gates[g].begin &&
          position < gates[g].begin + gates[g].length) {
        return static_cast<int>(g);
      }
    }
    return -1;
  }

  bool operator==(const Layout&) const = default;
};

inline Layout build_layout(const DatasetConfig& config) {
  config.validate();
  Layout layout;
  layout.single_gate = config.single_gate;
  layout.top_level = config.top_level;
  int cursor = 0;
  if (config.single_gate) {
    layout.gates.push_back({config.top_level, 0, config.top_gate_len});
    cursor = config.top_gate_len;
  } else {
    for (const auto& b : config.blocks) {
      for (int g = 0; g < b.n_gates; ++g) {
        layout.gates.push_back({b.gate_type, cursor, b.gate_len});
        cursor += b.gate_len;
      }
    }
  }
  layout.baseline_begin = cursor;
  layout.nr_baseline = config.nr_baseline;
  layout.length = cursor + config.nr_baseline;
  return layout;
}

// Compiled formula: positivity table per domain index plus the layout.
class Formula {
 public:
  explicit Formula(const DatasetConfig& config)
      : layout_(build_layout(config)) {
    positive_.reserve(config.domain.size());
    for (const auto& v : config.domain) {
      positive_.push_back(config.is_positive(v) ? 1 : 0);
    }
  }

  const Layout& layout() const { return layout_; }
  bool positive_code(std::uint8_t code) const { return positive_[code] != 0; }
  int domain_size() const { return static_cast<int>(positive_.size()); }

  bool gate_output(std::size_t gate, std::span<const std::uint8_t> codes) const {
    const GateSpan& span = layout_.gates[gate];
    int positives = 0;
    for (int p = span.begin; p < span.begin + span.length; ++p) {
      positives += positive_[codes[p]];
    }
    return gate_value(span.type, positives, span.length);
  }

  // Label of a sample given as domain indices.
  int eval_codes(std::span<const std::uint8_t> codes) const {
    if (layout_.single_gate) return gate_output(0, codes) ? 1 : 0;
    int positives = 0;
    for (std::size_t g = 0; g < layout_.gates.size(); ++g) {
      positives += gate_output(g, codes) ? 1 : 0;
    }
    return gate_value(layout_.top_level, positives,
                      static_cast<int>(layout_.gates.size()))
               ? 1
               : 0;
  }

 private:
  Layout layout_;
  std::vector<std::uint8_t> positive_;
};

inline std::vector<std::uint8_t> encode_inputs(const DatasetConfig& config,
                                               std::span<const Decimal> inputs) {
  require(static_cast<int>(inputs.size()) == config.length(),
          "input length " + std::to_string(inputs.size()) + " != " +
              std::to_string(config.length()));
  std::vector<std::uint8_t> codes(inputs.size());
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    auto index = config.domain_index(inputs[j]);
    require(index.has_value(), "input value " + inputs[j].to_string() +
                                   " at position " + std::to_string(j) +
                                   " is outside the domain");
    codes[j] = static_cast<std::uint8_t>(*index);
  }
  return codes;
}

inline int eval_formula(const DatasetConfig& config,
                        std::span<const Decimal> inputs) {
  Formula formula(config);
  return formula.eval_codes(encode_inputs(config, inputs));
}

enum class SplitTag : std::uint8_t { kFull, kTrain, kVal, kTest };

inline std::string_view to_string(SplitTag tag) {
  switch (tag) {
    case SplitTag::kFull: return "full";
    case SplitTag::kTrain: return "train";
    case SplitTag::kVal: return "val";
    case SplitTag::kTest: return "test";
  }
  return "?";
}

inline SplitTag parse_split_tag(std::string_view text) {
  if (text == "full") return SplitTag::kFull;
  if (text == "train") return SplitTag::kTrain;
  if (text == "val") return SplitTag::kVal;
  if (text == "test") return SplitTag::kTest;
  throw ValidationError("unknown split tag '" + std::string(text) + "'");
}

struct Sample {
  std::int64_t id = 0;
  // Domain indices; the value at position j is config.domain[codes[j]].
  std::vector<std::uint8_t> codes;
  int label = 0;

  bool operator==(const Sample&) const = default;
};

struct Dataset {
  DatasetConfig config;
  Layout layout;
  std::vector<Sample> samples;
  SplitTag split = SplitTag::kFull;

  std::size_t size() const { return samples.size(); }
  int length() const { return layout.length; }

  Decimal value(const Sample& s, int position) const {
    return config.domain[s.codes[position]];
  }
  std::vector<double> inputs(const Sample& s) const {
    std::vector<double> x(s.codes.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      x[j] = config.domain[s.codes[j]].to_double();
    }
    return x;
  }
  std::vector<Decimal> values(const Sample& s) const {
    std::vector<Decimal> x(s.codes.size());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = config.domain[s.codes[j]];
    return x;
  }
  std::vector<int> labels() const {
    std::vector<int> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.label);
    return out;
  }
  std::array<std::size_t, 2> class_counts() const {
    std::array<std::size_t, 2> counts{0, 0};
    for (const auto& s : samples) ++counts[s.label];
    return counts;
  }

  // Same config, chosen samples (by index, duplicates allowed).
  Dataset subset(std::span<const std::size_t> indices, SplitTag tag) const {
    Dataset out{config, layout, {}, tag};
    out.samples.reserve(indices.size());
    for (std::size_t i : indices) out.samples.push_back(samples.at(i));
    return out;
  }
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 1ULL << 22;

inline std::uint64_t checked_power(std::uint64_t base, int exponent,
                                   std::uint64_t cap) {
  std::uint64_t result = 1;
  for (int i = 0; i < exponent; ++i) {
    if (result > cap / base) return cap + 1;
    result *= base;
  }
  return result;
}

// All |domain|^l samples, lexicographic over domain order with position 0
// most significant. Sample ids are the enumeration index.
inline Dataset enumerate_samples(
    const DatasetConfig& config,
    std::uint64_t budget = kDefaultEnumerationBudget) {
  Formula formula(config);
  const int l = formula.layout().length;
  const std::uint64_t base = config.domain.size();
  const std::uint64_t count = checked_power(base, l, budget);
  if (count > budget) {
    const std::uint64_t required = checked_power(base, l, ~0ULL >> 1);
    throw BudgetError("enumerating '" + config.name + "' needs " +
                          std::to_string(required) + " samples (budget " +
                          std::to_string(budget) + ")",
                      required);
  }
  Dataset ds{config, formula.layout(), {}, SplitTag::kFull};
  ds.samples.reserve(count);
  std::vector<std::uint8_t> codes(l, 0);
  for (std::uint64_t id = 0; id < count; ++id) {
    std::uint64_t rest = id;
    for (int j = l - 1; j >= 0; --j) {
      codes[j] = static_cast<std::uint8_t>(rest % base);
      rest /= base;
    }
    ds.samples.push_back({static_cast<std::int64_t>(id), codes,
                          formula.eval_codes(codes)});
  }
  return ds;
}

// Presets: 7 settings x 3 top-level gates.
inline const std::vector<std::string>& preset_settings() {
  static const std::vector<std::string> kSettings = {
      "2inBinary",
      "2inQuaternary",
      "3inBinary",
      "2inBinaryDoubleGateAND",
      "2inBinaryDoubleGateOR",
      "2inBinaryDoubleGateXOR",
      "BinarySingleGate",
  };
  return kSettings;
}

inline std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& s : preset_settings()) {
    for (auto top : {GateType::kAnd, GateType::kOr, GateType::kXor}) {
      names.push_back(s + "-" + std::string(to_string(top)));
    }
  }
  return names;
}

inline DatasetConfig preset(std::string_view name, int nr_baseline = 2) {
  const auto dash = name.rfind('-');
  require(dash != std::string_view::npos,
          "unknown preset '" + std::string(name) + "'");
  const std::string setting(name.substr(0, dash));
  const std::string_view top = name.substr(dash + 1);
  if (top != "AND" && top != "OR" && top != "XOR") {
    throw ValidationError("unknown preset '" + std::string(name) + "'");
  }
  DatasetConfig c;
  c.name = std::string(name);
  c.nr_baseline = nr_baseline;
  c.top_level = parse_gate_type(top);
  c.domain = {Decimal::parse("-1"), Decimal::parse("1")};
  c.positives = {Decimal::parse("1")};
  auto all_three = [](int len) {
    return std::vector<BlockSpec>{{GateType::kAnd, 1, len},
                                  {GateType::kOr, 1, len},
                                  {GateType::kXor, 1, len}};
  };
  if (setting == "2inBinary") {
    c.blocks = all_three(2);
  } else if (setting == "2inQuaternary") {
    c.blocks = all_three(2);
    c.domain = {Decimal::parse("-1"), Decimal::parse("-0.333"),
                Decimal::parse("0.333"), Decimal::parse("1")};
    c.positives = {Decimal::parse("-0.333"), Decimal::parse("1")};
  } else if (setting == "3inBinary") {
    c.blocks = all_three(3);
  } else if (setting == "2inBinaryDoubleGateAND") {
    c.blocks = {{GateType::kAnd, 2, 2}};
  } else if (setting == "2inBinaryDoubleGateOR") {
    c.blocks = {{GateType::kOr, 2, 2}};
  } else if (setting == "2inBinaryDoubleGateXOR") {
    c.blocks = {{GateType::kXor, 2, 2}};
  } else if (setting == "BinarySingleGate") {
    c.single_gate = true;
    c.top_gate_len = 4;
  } else {
    throw ValidationError("unknown preset '" + std::string(name) + "'");
  }
  c.validate();
  return c;
}

// Test share used by the experiment runner: 8/2 for the two larger
// settings, 9/1 otherwise.
inline double default_test_fraction(const DatasetConfig& config) {
  if (config.name.starts_with("3inBinary") ||
      config.name.starts_with("2inQuaternary")) {
    return 0.2;
  }
  return 0.1;
}

struct SplitOptions {
  double test_fraction = 0.1;
  int n_folds = 5;
  int fold = 0;
  std::uint64_t seed = 0;
  // false: train = val = test = every sample.
  bool split_test = true;
};

struct Partition {
  Dataset train;
  Dataset val;
  Dataset test;
};

// Seeded shuffle; the first floor(n * test_fraction) samples form the test
// set, the remainder is cut into n_folds validation chunks and `fold`
// selects which chunk validates.
inline Partition split_dataset(const Dataset& dataset,
                               const SplitOptions& options) {
  if (!options.split_test) {
    std::vector<std::size_t> all(dataset.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return {dataset.subset(all, SplitTag::kTrain),
            dataset.subset(all, SplitTag::kVal),
            dataset.subset(all, SplitTag::kTest)};
  }
  require(options.test_fraction > 0.0 && options.test_fraction < 1.0,
          "test fraction must lie in (0, 1)");
  require(options.n_folds >= 2, "need at least 2 folds");
  require(options.fold >= 0 && options.fold < options.n_folds,
          "fold index out of range");
  const std::size_t n = dataset.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 gen(rng::derive(options.seed, "split"));
  rng::shuffle(order, gen);

  const auto n_test = static_cast<std::size_t>(
      static_cast<double>(n) * options.test_fraction);
  std::vector<std::size_t> test(order.begin(), order.begin() + n_test);
  const std::size_t pool = n - n_test;
  const auto folds = static_cast<std::size_t>(options.n_folds);
  const auto k = static_cast<std::size_t>(options.fold);
  const std::size_t lo = n_test + pool * k / folds;
  const std::size_t hi = n_test + pool * (k + 1) / folds;
  std::vector<std::size_t> val(order.begin() + lo, order.begin() + hi);
  std::vector<std::size_t> train;
  train.reserve(pool - val.size());
  for (std::size_t i = n_test; i < n; ++i) {
    if (i < lo || i >= hi) train.push_back(order[i]);
  }
  for (auto* part : {&test, &val, &train}) std::sort(part->begin(), part->end());
  require(!train.empty() && !test.empty(), "split produced an empty partition");
  return {dataset.subset(train, SplitTag::kTrain),
          dataset.subset(val, SplitTag::kVal),
          dataset.subset(test, SplitTag::kTest)};
}

// Oversamples every minority class (with replacement, seeded) up to the
// majority count. Original samples come first, in their original order.
inline Dataset balance_oversample(const Dataset& train, std::uint64_t seed) {
  const auto counts = train.class_counts();
  for (int c = 0; c < 2; ++c) {
    require(counts[c] > 0,
            "cannot balance: class " + std::to_string(c) + " absent from train");
  }
  const std::size_t target = std::max(counts[0], counts[1]);
  Dataset out = train;
  std::mt19937_64 gen(rng::derive(seed, "oversample"));
  for (int c = 0; c < 2; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < train.size(); ++i) {
      if (train.samples[i].label == c) members.push_back(i);
    }
    for (std::size_t k = members.size(); k < target; ++k) {
      out.samples.push_back(train.samples[members[rng::below(gen, members.size())]]);
    }
  }
  return out;
}

}  // namespace andor

#endif  // ANDOR_DATASET_HPP
