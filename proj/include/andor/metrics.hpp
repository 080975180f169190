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

#ifndef ANDOR_METRICS_HPP
#define ANDOR_METRICS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "andor/common.hpp"
#include "andor/dataset.hpp"
#include "andor/ground_truth.hpp"
#include "andor/masked_dataset.hpp"
#include "andor/saliency.hpp"
#include "json.hpp"

namespace andor {

// A metric that may be undefined (e.g. an empty denominator).
using MetricValue = std::optional<double>;

inline double baseline_threshold(std::span<const double> scores, const Layout& layout) {
  require(layout.nr_baseline >= 1, "layout has no baseline block");
  require(static_cast<int>(scores.size()) == layout.length, "score length mismatch");
  return *std::max_element(scores.begin() + layout.baseline_begin, scores.end());
}

inline double avg_factor_threshold(std::span<const double> scores, double factor) {
  require(!scores.empty(), "empty score vector");
  double sum = 0.0;
  for (double v : scores) sum += v;
  return sum / static_cast<double>(scores.size()) * factor;
}

inline double threshold_for(const ThresholdRule& rule, std::span<const double> scores,
                            const Layout& layout) {
  return rule.kind == ThresholdKind::kBaselineMax ? baseline_threshold(scores, layout)
                                                  : avg_factor_threshold(scores, rule.factor);
}

// Positions scored strictly above the threshold.
inline PositionSet kept_positions(std::span<const double> scores, double threshold) {
  PositionSet keep;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (scores[j] > threshold) keep.insert(static_cast<int>(j));
  }
  return keep;
}

// LeRF masking: everything scored at or below the threshold gets the fill.
inline MaskedSample mask_by_threshold(const Dataset& ds, const Sample& s,
                                      std::span<const double> scores, double threshold,
                                      double fill = 0.0) {
  require(scores.size() == s.codes.size(), "score length mismatch");
  MaskedSample m{s.id, s.label, kept_positions(scores, threshold), ds.inputs(s)};
  for (std::size_t j = 0; j < m.inputs.size(); ++j) {
    if (!m.keep.contains(static_cast<int>(j))) m.inputs[j] = fill;
  }
  return m;
}

// Rows of an order-1 tensor in the order of the split's samples.
class AlignedScores {
 public:
  AlignedScores(const Dataset& split, const SaliencyTensor& t) {
    require(t.order == 1, "metrics need an order-1 tensor (reduce order-2 tensors first)");
    require(t.length == split.length(), "tensor length does not match the dataset");
    std::unordered_map<std::int64_t, std::size_t> index;
    for (std::size_t i = 0; i < t.size(); ++i) index[t.ids[i]] = i;
    rows_.reserve(split.size());
    for (const auto& s : split.samples) {
      auto it = index.find(s.id);
      require(it != index.end(), "no saliency scores for sample " + std::to_string(s.id));
      rows_.push_back(&t.scores[it->second]);
    }
  }
  const std::vector<double>& operator[](std::size_t i) const { return *rows_[i]; }
  std::size_t size() const { return rows_.size(); }

 private:
  std::vector<const std::vector<double>*> rows_;
};

inline MaskedDataset mask_split(const Dataset& split, const SaliencyTensor& t,
                                const ThresholdRule& rule, double fill = 0.0) {
  AlignedScores rows(split, t);
  MaskedDataset out{split.config.name, split.layout, fill, rule, {}};
  out.samples.reserve(split.size());
  for (std::size_t i = 0; i < split.size(); ++i) {
    const double thr = threshold_for(rule, rows[i], split.layout);
    out.samples.push_back(mask_by_threshold(split, split.samples[i], rows[i], thr, fill));
  }
  return out;
}

struct ClassRates {
  MetricValue full;
  MetricValue balanced;
  std::array<MetricValue, 2> per_class;
  std::vector<std::string> warnings;
};

namespace detail {

inline ClassRates rates_from_counts(const std::array<double, 2>& bad,
                                    const std::array<double, 2>& total, const char* metric) {
  ClassRates r;
  const double all = total[0] + total[1];
  if (all > 0) r.full = 100.0 * (bad[0] + bad[1]) / all;
  double sum = 0.0;
  int defined = 0;
  for (int c = 0; c < 2; ++c) {
    if (total[c] > 0) {
      r.per_class[c] = 100.0 * bad[c] / total[c];
      sum += *r.per_class[c];
      ++defined;
    } else {
      r.warnings.push_back(std::string(metric) + ": class " + std::to_string(c) +
                           " is empty in this split; excluded from the balanced average");
    }
  }
  if (defined > 0) r.balanced = sum / defined;
  return r;
}

}  // namespace detail

enum class NibReading : std::uint8_t {
  // Violation iff no minimum set is entirely above the threshold.
  kAnyMinimumSet,
  // Violation iff any member of any minimum set is at or below it.
  kEveryMinimumSet,
};

// Percentage of samples lacking a fully relevant minimum set.
inline ClassRates nib(const Dataset& split, const SaliencyTensor& t, const GroundTruth& truth,
                      NibReading reading = NibReading::kAnyMinimumSet) {
  AlignedScores rows(split, t);
  std::array<double, 2> bad{0, 0}, total{0, 0};
  for (std::size_t i = 0; i < split.size(); ++i) {
    const auto& s = split.samples[i];
    const PositionSet above = kept_positions(rows[i], baseline_threshold(rows[i], split.layout));
    const PrimeSets& gt = truth.at(s.id);
    bool violates;
    if (reading == NibReading::kAnyMinimumSet) {
      violates = std::none_of(gt.r_min.begin(), gt.r_min.end(),
                              [above](PositionSet r) { return r.is_subset_of(above); });
    } else {
      violates = std::any_of(gt.r_min.begin(), gt.r_min.end(),
                             [above](PositionSet r) { return !r.is_subset_of(above); });
    }
    total[s.label] += 1;
    bad[s.label] += violates ? 1 : 0;
  }
  return detail::rates_from_counts(bad, total, "NIB");
}

// Percentage of r_max positions scored at or below the baseline threshold.
inline ClassRates gib(const Dataset& split, const SaliencyTensor& t, const GroundTruth& truth) {
  AlignedScores rows(split, t);
  std::array<double, 2> bad{0, 0}, total{0, 0};
  for (std::size_t i = 0; i < split.size(); ++i) {
    const auto& s = split.samples[i];
    const PositionSet above = kept_positions(rows[i], baseline_threshold(rows[i], split.layout));
    const PositionSet rmax = truth.at(s.id).r_max;
    total[s.label] += rmax.size();
    bad[s.label] += rmax.size() - (rmax & above).size();
  }
  return detail::rates_from_counts(bad, total, "GIB");
}

enum class Tri : std::uint8_t { kFalse, kTrue, kUnknown };

inline std::string_view to_string(Tri t) {
  switch (t) {
    case Tri::kFalse: return "false";
    case Tri::kTrue: return "true";
    case Tri::kUnknown: return "undefined";
  }
  return "?";
}

// Strong-Kleene gate over known-positive, known-negative and unknown input
// counts. Exact: an unknown input can always be completed either way.
inline Tri three_valued_gate(GateType type, int positives, int negatives, int unknowns) {
  switch (type) {
    case GateType::kAnd:
      if (negatives > 0) return Tri::kFalse;
      return unknowns == 0 ? Tri::kTrue : Tri::kUnknown;
    case GateType::kOr:
      if (positives > 0) return Tri::kTrue;
      return unknowns == 0 ? Tri::kFalse : Tri::kUnknown;
    case GateType::kXor:
      if (positives >= 2) return Tri::kFalse;
      if (unknowns == 0) return positives == 1 ? Tri::kTrue : Tri::kFalse;
      return Tri::kUnknown;
  }
  return Tri::kUnknown;
}

// Partially known sample: domain index per position, or -1 when masked.
using PartialCodes = std::vector<int>;

inline PartialCodes partial_codes(const Dataset& ds, const MaskedSample& m) {
  PartialCodes out(m.inputs.size(), -1);
  for (std::size_t j = 0; j < m.inputs.size(); ++j) {
    if (!m.keep.contains(static_cast<int>(j))) continue;
    auto idx = ds.config.domain_index(Decimal::from_double(m.inputs[j]));
    require(idx.has_value(), "kept value outside the domain in sample " + std::to_string(m.id));
    out[j] = *idx;
  }
  return out;
}

class ThreeValuedEvaluator {
 public:
  explicit ThreeValuedEvaluator(const DatasetConfig& config) : formula_(config) {}

  Tri gate(std::size_t g, const PartialCodes& codes) const {
    const GateSpan& span = formula_.layout().gates[g];
    int pos = 0, neg = 0, unk = 0;
    for (int p = span.begin; p < span.begin + span.length; ++p) {
      if (codes[p] < 0) {
        ++unk;
      } else if (formula_.positive_code(static_cast<std::uint8_t>(codes[p]))) {
        ++pos;
      } else {
        ++neg;
      }
    }
    return three_valued_gate(span.type, pos, neg, unk);
  }

  Tri operator()(const PartialCodes& codes) const {
    const Layout& layout = formula_.layout();
    require(static_cast<int>(codes.size()) == layout.length, "input length mismatch");
    if (layout.single_gate) return gate(0, codes);
    int pos = 0, neg = 0, unk = 0;
    for (std::size_t g = 0; g < layout.gates.size(); ++g) {
      switch (gate(g, codes)) {
        case Tri::kTrue: ++pos; break;
        case Tri::kFalse: ++neg; break;
        case Tri::kUnknown: ++unk; break;
      }
    }
    return three_valued_gate(layout.top_level, pos, neg, unk);
  }

  const Formula& formula() const { return formula_; }

 private:
  Formula formula_;
};

inline Tri three_valued_eval(const DatasetConfig& config, const PartialCodes& codes) {
  return ThreeValuedEvaluator(config)(codes);
}

inline constexpr std::uint64_t kDefaultCompletionBudget = 1ULL << 24;

// Completion counts by label: [label 0, label 1] over all ways to fill the
// masked positions with domain values.
inline std::array<std::uint64_t, 2> enumerate_completions(
    const DatasetConfig& config, const PartialCodes& codes,
    std::uint64_t budget = kDefaultCompletionBudget) {
  Formula formula(config);
  std::vector<int> free;
  for (std::size_t j = 0; j < codes.size(); ++j) {
    if (codes[j] < 0) free.push_back(static_cast<int>(j));
  }
  const std::uint64_t base = config.domain.size();
  const std::uint64_t count = checked_power(base, static_cast<int>(free.size()), budget);
  if (count > budget) {
    throw BudgetError("completion enumeration needs " +
                          std::to_string(checked_power(base, static_cast<int>(free.size()),
                                                       ~0ULL >> 1)) +
                          " completions",
                      checked_power(base, static_cast<int>(free.size()), ~0ULL >> 1));
  }
  std::vector<std::uint8_t> full(codes.size());
  for (std::size_t j = 0; j < codes.size(); ++j) {
    full[j] = codes[j] < 0 ? 0 : static_cast<std::uint8_t>(codes[j]);
  }
  std::array<std::uint64_t, 2> out{0, 0};
  for (std::uint64_t k = 0; k < count; ++k) {
    std::uint64_t rest = k;
    for (int p : free) {
      full[p] = static_cast<std::uint8_t>(rest % base);
      rest /= base;
    }
    ++out[formula.eval_codes(full)];
  }
  return out;
}

// True iff the three-valued evaluator is defined exactly when all
// completions agree, and then returns the agreed value.
inline bool three_valued_vs_completions(const DatasetConfig& config, const PartialCodes& codes,
                                        std::uint64_t budget = kDefaultCompletionBudget) {
  const auto counts = enumerate_completions(config, codes, budget);
  const Tri tri = three_valued_eval(config, codes);
  if (counts[0] > 0 && counts[1] > 0) return tri == Tri::kUnknown;
  return tri == (counts[1] > 0 ? Tri::kTrue : Tri::kFalse);
}

// Exact completion counts without enumeration: per gate, the number of
// completions of its masked inputs that make it true or false, combined
// through the top-level gate by a convolution over the count of true gates.
// Baseline positions never affect the label and are left out, which scales
// both counts by the same factor.
class CompletionCounter {
 public:
  using Count = unsigned __int128;

  explicit CompletionCounter(const DatasetConfig& config) : formula_(config) {
    for (std::size_t k = 0; k < config.domain.size(); ++k) {
      (config.is_positive(config.domain[k]) ? n_pos_ : n_neg_) += 1;
    }
    const double bits = std::log2(static_cast<double>(config.domain.size())) *
                        formula_.layout().baseline_begin;
    require(bits < 120, "completion counts would overflow 128 bits");
  }

  // [false count, true count] for gate g.
  std::array<Count, 2> gate_counts(std::size_t g, const PartialCodes& codes) const {
    const GateSpan& span = formula_.layout().gates[g];
    int pos = 0, unk = 0;
    for (int p = span.begin; p < span.begin + span.length; ++p) {
      if (codes[p] < 0) {
        ++unk;
      } else if (formula_.positive_code(static_cast<std::uint8_t>(codes[p]))) {
        ++pos;
      }
    }
    std::array<Count, 2> out{0, 0};
    for (int k = 0; k <= unk; ++k) {
      const Count ways = binomial(unk, k) * power(n_pos_, k) * power(n_neg_, unk - k);
      out[gate_value(span.type, pos + k, span.length) ? 1 : 0] += ways;
    }
    return out;
  }

  std::array<Count, 2> label_counts(const PartialCodes& codes) const {
    const Layout& layout = formula_.layout();
    if (layout.single_gate) return gate_counts(0, codes);
    // dist[t] = completions with exactly t true gates so far.
    std::vector<Count> dist(1, 1);
    for (std::size_t g = 0; g < layout.gates.size(); ++g) {
      const auto c = gate_counts(g, codes);
      std::vector<Count> next(dist.size() + 1, 0);
      for (std::size_t t = 0; t < dist.size(); ++t) {
        next[t] += dist[t] * c[0];
        next[t + 1] += dist[t] * c[1];
      }
      dist = std::move(next);
    }
    std::array<Count, 2> out{0, 0};
    const int n = static_cast<int>(layout.gates.size());
    for (int t = 0; t <= n; ++t) {
      out[gate_value(layout.top_level, t, n) ? 1 : 0] += dist[t];
    }
    return out;
  }

  // Majority label over completions; nullopt on an exact tie.
  std::optional<int> majority(const PartialCodes& codes) const {
    const auto c = label_counts(codes);
    if (c[0] == c[1]) return std::nullopt;
    return c[1] > c[0] ? 1 : 0;
  }

 private:
  static Count power(Count base, int e) {
    Count r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
  }
  static Count binomial(int n, int k) {
    Count r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<Count>(n - k + i) / static_cast<Count>(i);
    return r;
  }

  Formula formula_;
  std::uint64_t n_pos_ = 0;
  std::uint64_t n_neg_ = 0;
};

// Percentage of masked samples whose three-valued evaluation equals the
// label; undefined evaluations count as wrong.
inline MetricValue logical_accuracy(const Dataset& ds, const MaskedDataset& masked) {
  if (masked.size() == 0) return std::nullopt;
  ThreeValuedEvaluator eval(ds.config);
  std::size_t hits = 0;
  for (const auto& m : masked.samples) {
    const Tri t = eval(partial_codes(ds, m));
    hits += (t == Tri::kTrue && m.label == 1) || (t == Tri::kFalse && m.label == 0) ? 1 : 0;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(masked.size());
}

// Percentage of masked samples whose majority label over uniform
// completions equals the label; ties count as wrong.
inline MetricValue statistical_logical_accuracy(const Dataset& ds, const MaskedDataset& masked) {
  if (masked.size() == 0) return std::nullopt;
  CompletionCounter counter(ds.config);
  std::size_t hits = 0;
  for (const auto& m : masked.samples) {
    const auto pred = counter.majority(partial_codes(ds, m));
    hits += pred.has_value() && *pred == m.label ? 1 : 0;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(masked.size());
}

// Enumeration-based reference for statistical_logical_accuracy.
inline MetricValue statistical_logical_accuracy_enumerated(
    const Dataset& ds, const MaskedDataset& masked,
    std::uint64_t budget = kDefaultCompletionBudget) {
  if (masked.size() == 0) return std::nullopt;
  std::size_t hits = 0;
  for (const auto& m : masked.samples) {
    const auto c = enumerate_completions(ds.config, partial_codes(ds, m), budget);
    if (c[0] != c[1]) hits += (c[1] > c[0] ? 1 : 0) == m.label ? 1 : 0;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(masked.size());
}

// Percentage of predictions equal to the labels.
inline MetricValue prediction_accuracy(std::span<const int> preds, std::span<const int> labels) {
  require(preds.size() == labels.size(), "prediction and label counts differ");
  if (preds.empty()) return std::nullopt;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) hits += preds[i] == labels[i] ? 1 : 0;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(preds.size());
}

enum class DcaCounting : std::uint8_t { kGroups, kPairs };

namespace detail {

inline std::vector<double> pattern_key(const MaskedSample& m, int begin, int end) {
  std::vector<double> key;
  key.reserve(2 * (end - begin));
  for (int j = begin; j < end; ++j) {
    key.push_back(m.keep.contains(j) ? 1.0 : 0.0);
    key.push_back(m.inputs[j]);
  }
  return key;
}

}  // namespace detail

// Full double class assignment. Among samples whose original and retrained
// predictions agree, group by the masked non-baseline inputs; a sample
// counts iff its group holds both retrained classes. The pair variant
// counts conflicting pairs among all same-group pairs instead.
inline MetricValue full_dca(const MaskedDataset& masked, std::span<const int> original_preds,
                            std::span<const int> retrained_preds,
                            DcaCounting counting = DcaCounting::kGroups) {
  require(original_preds.size() == masked.size() && retrained_preds.size() == masked.size(),
          "prediction counts do not match the masked split");
  std::map<std::vector<double>, std::array<std::size_t, 2>> groups;
  std::size_t restricted = 0;
  for (std::size_t i = 0; i < masked.size(); ++i) {
    if (original_preds[i] != retrained_preds[i]) continue;
    ++restricted;
    ++groups[detail::pattern_key(masked.samples[i], 0, masked.layout.baseline_begin)]
            [retrained_preds[i]];
  }
  if (restricted == 0) return std::nullopt;
  if (counting == DcaCounting::kGroups) {
    std::size_t counted = 0;
    for (const auto& [key, c] : groups) {
      if (c[0] > 0 && c[1] > 0) counted += c[0] + c[1];
    }
    return 100.0 * static_cast<double>(counted) / static_cast<double>(restricted);
  }
  double conflicting = 0.0, pairs = 0.0;
  for (const auto& [key, c] : groups) {
    const double n = static_cast<double>(c[0] + c[1]);
    pairs += n * (n - 1) / 2;
    conflicting += static_cast<double>(c[0]) * static_cast<double>(c[1]);
  }
  if (pairs == 0) return std::nullopt;
  return 100.0 * conflicting / pairs;
}

// Minimal double class assignment. Eligible pairs are (sample, gate) where
// the gate meets every prime set of the sample, so its output is forced,
// and the original and retrained predictions agree. Pairs are grouped by
// (gate, masked gate inputs); a pair counts iff its group contains both
// forced outputs.
inline MetricValue minimal_dca(const Dataset& split, const GroundTruth& truth,
                               const MaskedDataset& masked, std::span<const int> original_preds,
                               std::span<const int> retrained_preds) {
  require(masked.size() == split.size(), "masked split does not match the dataset split");
  require(original_preds.size() == split.size() && retrained_preds.size() == split.size(),
          "prediction counts do not match the split");
  Formula formula(split.config);
  std::map<std::pair<int, std::vector<double>>, std::array<std::size_t, 2>> groups;
  std::size_t eligible = 0;
  for (std::size_t i = 0; i < split.size(); ++i) {
    if (original_preds[i] != retrained_preds[i]) continue;
    const auto& s = split.samples[i];
    require(masked.samples[i].id == s.id, "masked split is not aligned with the dataset split");
    for (int g : necessary_gates(split.layout, truth.at(s.id))) {
      const GateSpan& span = split.layout.gates[g];
      const int out = formula.gate_output(g, s.codes) ? 1 : 0;
      ++groups[{g, detail::pattern_key(masked.samples[i], span.begin, span.begin + span.length)}]
              [out];
      ++eligible;
    }
  }
  if (eligible == 0) return std::nullopt;
  std::size_t counted = 0;
  for (const auto& [key, c] : groups) {
    if (c[0] > 0 && c[1] > 0) counted += c[0] + c[1];
  }
  return 100.0 * static_cast<double>(counted) / static_cast<double>(eligible);
}

struct CorrelationResult {
  MetricValue avg_significant_abs_r;
  MetricValue pct_significant;
  std::size_t pairs = 0;
  std::size_t skipped = 0;
  std::size_t significant = 0;
};

inline std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 || sbb == 0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

// Two-tailed p-value of a Pearson coefficient over n samples.
inline double pearson_p_value(double r, std::size_t n) {
  if (std::abs(r) >= 1.0) return 0.0;
  const double df = static_cast<double>(n) - 2.0;
  const double t = std::abs(r) * std::sqrt(df / (1.0 - r * r));
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, t));
}

// Correlation between every gate-input score column and every baseline
// score column across the samples of a tensor.
inline CorrelationResult baseline_correlation(const SaliencyTensor& t, const Layout& layout,
                                              double alpha = 0.05) {
  require(t.order == 1, "correlation needs an order-1 tensor");
  require(t.size() >= 3, "correlation needs at least 3 samples");
  require(t.length == layout.length, "tensor length does not match the layout");
  std::vector<std::vector<double>> cols(layout.length, std::vector<double>(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (int j = 0; j < layout.length; ++j) cols[j][i] = t.scores[i][j];
  }
  CorrelationResult out;
  double sum_abs = 0.0;
  for (int j = 0; j < layout.baseline_begin; ++j) {
    for (int b = layout.baseline_begin; b < layout.length; ++b) {
      ++out.pairs;
      const auto r = pearson(cols[j], cols[b]);
      if (!r) {
        ++out.skipped;
        continue;
      }
      if (pearson_p_value(*r, t.size()) < alpha) {
        ++out.significant;
        sum_abs += std::abs(*r);
      }
    }
  }
  if (out.pairs > 0) {
    out.pct_significant = 100.0 * static_cast<double>(out.significant) /
                          static_cast<double>(out.pairs);
  }
  if (out.significant > 0) out.avg_significant_abs_r = sum_abs / static_cast<double>(out.significant);
  return out;
}

// One row of results for a (dataset, method, fold) experiment. Values are
// percentages; absent values are undefined for that experiment.
struct MetricReport {
  std::string dataset;
  std::string scenario;
  std::string method;
  int fold = 0;
  bool split_test = true;
  bool base_full_accuracy = false;
  // Per class: bit 0 complementary, bit 1 redundant.
  std::array<int, 2> class_info{0, 0};

  MetricValue nib_full, nib_balanced, gib_full, gib_balanced;
  MetricValue nib_class0, nib_class1, gib_class0, gib_class1;
  MetricValue retrain_acc, logical_acc, statistical_logical_acc;
  MetricValue logical_acc_diff, statistical_logical_acc_diff;
  MetricValue full_dca_t10, full_dca_t08, full_dca_t05, minimal_dca;
  MetricValue corr_avg_significant, corr_pct_significant;
  MetricValue gtm_fidelity, fcam_fidelity, tgtm_fidelity, tfcam_fidelity;

  bool operator==(const MetricReport&) const = default;
};

using MetricField = std::pair<std::string_view, MetricValue MetricReport::*>;

inline const std::vector<MetricField>& metric_fields() {
  static const std::vector<MetricField> kFields = {
      {"nib_full", &MetricReport::nib_full},
      {"nib_balanced", &MetricReport::nib_balanced},
      {"gib_full", &MetricReport::gib_full},
      {"gib_balanced", &MetricReport::gib_balanced},
      {"nib_class0", &MetricReport::nib_class0},
      {"nib_class1", &MetricReport::nib_class1},
      {"gib_class0", &MetricReport::gib_class0},
      {"gib_class1", &MetricReport::gib_class1},
      {"retrain_acc", &MetricReport::retrain_acc},
      {"logical_acc", &MetricReport::logical_acc},
      {"statistical_logical_acc", &MetricReport::statistical_logical_acc},
      {"logical_acc_diff", &MetricReport::logical_acc_diff},
      {"statistical_logical_acc_diff", &MetricReport::statistical_logical_acc_diff},
      {"full_dca_t1.0", &MetricReport::full_dca_t10},
      {"full_dca_t0.8", &MetricReport::full_dca_t08},
      {"full_dca_t0.5", &MetricReport::full_dca_t05},
      {"minimal_dca", &MetricReport::minimal_dca},
      {"corr_avg_significant", &MetricReport::corr_avg_significant},
      {"corr_pct_significant", &MetricReport::corr_pct_significant},
      {"gtm_fidelity", &MetricReport::gtm_fidelity},
      {"fcam_fidelity", &MetricReport::fcam_fidelity},
      {"tgtm_fidelity", &MetricReport::tgtm_fidelity},
      {"tfcam_fidelity", &MetricReport::tfcam_fidelity},
  };
  return kFields;
}

inline MetricValue& metric_ref(MetricReport& r, std::string_view name) {
  for (const auto& [n, member] : metric_fields()) {
    if (n == name) return r.*member;
  }
  throw ValidationError("unknown metric '" + std::string(name) + "'");
}

inline MetricValue metric_value(const MetricReport& r, std::string_view name) {
  return metric_ref(const_cast<MetricReport&>(r), name);
}

inline std::string report_to_json(const MetricReport& r) {
  nlohmann::ordered_json j = {{"dataset", r.dataset},
                              {"scenario", r.scenario},
                              {"method", r.method},
                              {"fold", r.fold},
                              {"split_test", r.split_test},
                              {"base_full_accuracy", r.base_full_accuracy},
                              {"class_info", r.class_info}};
  for (const auto& [name, member] : metric_fields()) {
    const auto& v = r.*member;
    if (v) {
      j[std::string(name)] = *v;
    } else {
      j[std::string(name)] = nullptr;
    }
  }
  return j.dump();
}

inline MetricReport report_from_json(const std::string& line) {
  try {
    auto j = nlohmann::json::parse(line);
    MetricReport r;
    r.dataset = j.at("dataset").get<std::string>();
    r.scenario = j.at("scenario").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.fold = j.at("fold").get<int>();
    r.split_test = j.at("split_test").get<bool>();
    r.base_full_accuracy = j.at("base_full_accuracy").get<bool>();
    r.class_info = j.at("class_info").get<std::array<int, 2>>();
    for (const auto& [name, member] : metric_fields()) {
      auto it = j.find(std::string(name));
      if (it != j.end() && !it->is_null()) r.*member = it->get<double>();
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed metric report: ") + e.what());
  }
}

inline std::string reports_to_jsonl(const std::vector<MetricReport>& reports) {
  std::string out;
  for (const auto& r : reports) out += report_to_json(r) + "\n";
  return out;
}

inline std::vector<MetricReport> reports_from_jsonl(const std::string& text) {
  std::vector<MetricReport> out;
  std::size_t begin = 0;
  while (begin < text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string::npos) end = text.size();
    if (end > begin) out.push_back(report_from_json(text.substr(begin, end - begin)));
    begin = end + 1;
  }
  return out;
}

// Flat CSV, one row per report; undefined values are empty cells.
inline std::string reports_to_csv(const std::vector<MetricReport>& reports) {
  std::string out =
      "dataset,scenario,method,fold,split_test,base_full_accuracy,class0_info,class1_info";
  for (const auto& [name, member] : metric_fields()) out += "," + std::string(name);
  out += "\n";
  for (const auto& r : reports) {
    out += r.dataset + "," + r.scenario + "," + r.method + "," + std::to_string(r.fold) + "," +
           (r.split_test ? "1" : "0") + "," + (r.base_full_accuracy ? "1" : "0") + "," +
           std::to_string(r.class_info[0]) + "," + std::to_string(r.class_info[1]);
    for (const auto& [name, member] : metric_fields()) {
      out += ",";
      if (r.*member) out += format_double(*(r.*member));
    }
    out += "\n";
  }
  return out;
}

}  // namespace andor

#endif  // ANDOR_METRICS_HPP
