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

#ifndef ANDOR_GROUND_TRUTH_HPP
#define ANDOR_GROUND_TRUTH_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "andor/common.hpp"
#include "andor/dataset.hpp"
#include "andor/dataset_io.hpp"
#include "andor/hash.hpp"
#include "json.hpp"

namespace andor {

// Inclusion-minimal sufficient position sets of one sample.
struct PrimeSets {
  std::vector<PositionSet> primes;  // canonical order
  std::vector<PositionSet> r_min;   // the minimum-cardinality primes
  PositionSet r_max;                // union of all primes

  static PrimeSets from_primes(std::vector<PositionSet> primes) {
    std::sort(primes.begin(), primes.end(), canonical_less);
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    PrimeSets out;
    out.primes = std::move(primes);
    if (!out.primes.empty()) {
      const int smallest = out.primes.front().size();
      for (const auto& p : out.primes) {
        if (p.size() == smallest) out.r_min.push_back(p);
        out.r_max = out.r_max | p;
      }
    }
    return out;
  }

  // Lexicographically first minimum-cardinality set.
  PositionSet first_min() const {
    return *std::min_element(r_min.begin(), r_min.end(), lexicographic_less);
  }

  bool operator==(const PrimeSets&) const = default;
};

inline constexpr std::uint64_t kDefaultTruthBudget = 1ULL << 27;

// Exhaustive oracle: s is sufficient for x iff every sample agreeing with x
// on s has x's label. Labels are tabulated per subset over projected codes,
// so each check is one lookup.
class BruteForcePrimeSets {
 public:
  explicit BruteForcePrimeSets(const DatasetConfig& config,
                               std::uint64_t budget = kDefaultTruthBudget)
      : formula_(config) {
    const int l = formula_.layout().length;
    base_ = config.domain.size();
    const std::uint64_t patterns = checked_power(base_, l, budget);
    const std::uint64_t subsets = std::uint64_t{1} << l;
    if (l >= 40 || patterns > budget || patterns > budget / subsets) {
      const std::uint64_t required =
          l >= 40 ? ~0ULL : checked_power(base_, l, ~0ULL >> 1) * subsets;
      throw BudgetError("brute-force prime sets for '" + config.name +
                            "' need " + std::to_string(required) +
                            " table cells (budget " + std::to_string(budget) + ")",
                        required);
    }
    patterns_ = patterns;
    place_.assign(l, 1);
    for (int j = l - 2; j >= 0; --j) place_[j] = place_[j + 1] * base_;

    Dataset all = enumerate_samples(config, patterns);
    table_.assign(subsets * patterns, 0);
    for (std::uint64_t s = 0; s < subsets; ++s) {
      std::uint8_t* row = table_.data() + s * patterns;
      for (const auto& sample : all.samples) {
        row[project(sample.codes, PositionSet(s))] |=
            static_cast<std::uint8_t>(1u << sample.label);
      }
    }
    order_.reserve(subsets);
    for (std::uint64_t s = 0; s < subsets; ++s) order_.emplace_back(s);
    std::sort(order_.begin(), order_.end(), canonical_less);
  }

  bool sufficient(std::span<const std::uint8_t> codes, PositionSet s) const {
    const std::uint8_t seen = table_[s.bits() * patterns_ + project(codes, s)];
    return seen == 1 || seen == 2;
  }

  PrimeSets operator()(const Sample& sample) const {
    std::vector<PositionSet> primes;
    for (PositionSet s : order_) {
      bool covered = false;
      for (PositionSet p : primes) {
        if (p.is_subset_of(s)) {
          covered = true;
          break;
        }
      }
      if (!covered && sufficient(sample.codes, s)) primes.push_back(s);
    }
    return PrimeSets::from_primes(std::move(primes));
  }

 private:
  std::uint64_t project(std::span<const std::uint8_t> codes, PositionSet s) const {
    std::uint64_t index = 0;
    for (std::uint64_t b = s.bits(); b != 0; b &= b - 1) {
      const int j = std::countr_zero(b);
      index += codes[j] * place_[j];
    }
    return index;
  }

  Formula formula_;
  std::uint64_t base_ = 2;
  std::uint64_t patterns_ = 0;
  std::vector<std::uint64_t> place_;
  std::vector<std::uint8_t> table_;
  std::vector<PositionSet> order_;
};

inline PrimeSets bruteforce_prime_sets(const DatasetConfig& config,
                                       const Sample& sample) {
  return BruteForcePrimeSets(config)(sample);
}

// Minimal sets of inputs (given as `members`) that force a gate to its
// current value, where `positive[k]` is the truth of members[k].
inline std::vector<PositionSet> gate_forcing_sets(GateType type,
                                                  const std::vector<int>& members,
                                                  const std::vector<bool>& positive) {
  std::vector<int> pos;
  std::vector<int> neg;
  PositionSet all;
  for (std::size_t k = 0; k < members.size(); ++k) {
    (positive[k] ? pos : neg).push_back(members[k]);
    all.insert(members[k]);
  }
  std::vector<PositionSet> out;
  auto singles = [&out](const std::vector<int>& v) {
    for (int p : v) out.push_back(PositionSet::from_positions({p}));
  };
  switch (type) {
    case GateType::kAnd:
      // true needs every input; false needs any one negative input
      if (neg.empty()) out.push_back(all); else singles(neg);
      break;
    case GateType::kOr:
      if (!pos.empty()) singles(pos); else out.push_back(all);
      break;
    case GateType::kXor:
      // exactly one positive (true) or no positive (false) needs every
      // input; two or more positives are refuted by any positive pair
      if (pos.size() <= 1) {
        out.push_back(all);
      } else {
        for (std::size_t a = 0; a < pos.size(); ++a) {
          for (std::size_t b = a + 1; b < pos.size(); ++b) {
            out.push_back(PositionSet::from_positions({pos[a], pos[b]}));
          }
        }
      }
      break;
  }
  return out;
}

// Composes per-gate forcing sets through the top-level gate: a prime set is
// a minimal top-level forcing set of gates with one forcing set chosen per
// gate.
class AnalyticPrimeSets {
 public:
  explicit AnalyticPrimeSets(const DatasetConfig& config) : formula_(config) {}

  PrimeSets operator()(const Sample& sample) const {
    const Layout& layout = formula_.layout();
    std::vector<std::vector<PositionSet>> per_gate;
    std::vector<bool> outputs;
    for (std::size_t g = 0; g < layout.gates.size(); ++g) {
      const GateSpan& span = layout.gates[g];
      std::vector<int> members;
      std::vector<bool> positive;
      for (int p = span.begin; p < span.begin + span.length; ++p) {
        members.push_back(p);
        positive.push_back(formula_.positive_code(sample.codes[p]));
      }
      per_gate.push_back(gate_forcing_sets(span.type, members, positive));
      outputs.push_back(formula_.gate_output(g, sample.codes));
    }
    if (layout.single_gate) return PrimeSets::from_primes(per_gate[0]);

    std::vector<int> gate_ids(layout.gates.size());
    for (std::size_t g = 0; g < gate_ids.size(); ++g) gate_ids[g] = static_cast<int>(g);
    std::vector<PositionSet> primes;
    for (PositionSet gates : gate_forcing_sets(layout.top_level, gate_ids, outputs)) {
      std::vector<PositionSet> partial = {PositionSet{}};
      for (int g : gates.positions()) {
        std::vector<PositionSet> next;
        for (PositionSet acc : partial) {
          for (PositionSet choice : per_gate[g]) next.push_back(acc | choice);
        }
        partial = std::move(next);
      }
      primes.insert(primes.end(), partial.begin(), partial.end());
    }
    std::vector<PositionSet> minimal;
    for (PositionSet a : primes) {
      bool dominated = false;
      for (PositionSet b : primes) {
        if (b != a && b.is_subset_of(a)) {
          dominated = true;
          break;
        }
      }
      if (!dominated) minimal.push_back(a);
    }
    return PrimeSets::from_primes(std::move(minimal));
  }

 private:
  Formula formula_;
};

inline PrimeSets analytic_prime_sets(const DatasetConfig& config,
                                     const Sample& sample) {
  return AnalyticPrimeSets(config)(sample);
}

// Gates whose output every prime set depends on, i.e. gates that are
// unambiguously relevant for the sample's class.
inline std::vector<int> necessary_gates(const Layout& layout,
                                        const PrimeSets& truth) {
  std::vector<int> out;
  for (std::size_t g = 0; g < layout.gates.size(); ++g) {
    const PositionSet span = layout.gates[g].positions();
    bool all = !truth.primes.empty();
    for (PositionSet p : truth.primes) {
      if (!p.intersects(span)) {
        all = false;
        break;
      }
    }
    if (all) out.push_back(static_cast<int>(g));
  }
  return out;
}

// Per-sample ground truth for a dataset, looked up by sample id.
class GroundTruth {
 public:
  GroundTruth() = default;
  GroundTruth(std::string dataset_name, std::vector<std::int64_t> ids,
              std::vector<PrimeSets> sets)
      : dataset_name_(std::move(dataset_name)),
        ids_(std::move(ids)),
        sets_(std::move(sets)) {
    require(ids_.size() == sets_.size(), "ground truth size mismatch");
    for (std::size_t i = 0; i < ids_.size(); ++i) index_[ids_[i]] = i;
  }

  const std::string& dataset_name() const { return dataset_name_; }
  std::size_t size() const { return sets_.size(); }
  const std::vector<std::int64_t>& ids() const { return ids_; }
  const std::vector<PrimeSets>& sets() const { return sets_; }

  const PrimeSets& at(std::int64_t id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
      throw ValidationError("no ground truth for sample " + std::to_string(id));
    }
    return sets_[it->second];
  }

 private:
  std::string dataset_name_;
  std::vector<std::int64_t> ids_;
  std::vector<PrimeSets> sets_;
  std::unordered_map<std::int64_t, std::size_t> index_;
};

enum class TruthMethod { kAnalytic, kBruteForce };

inline GroundTruth compute_ground_truth(const Dataset& ds,
                                        TruthMethod method = TruthMethod::kAnalytic) {
  std::vector<std::int64_t> ids;
  std::vector<PrimeSets> sets;
  ids.reserve(ds.size());
  sets.reserve(ds.size());
  if (method == TruthMethod::kAnalytic) {
    AnalyticPrimeSets engine(ds.config);
    for (const auto& s : ds.samples) {
      ids.push_back(s.id);
      sets.push_back(engine(s));
    }
  } else {
    BruteForcePrimeSets engine(ds.config);
    for (const auto& s : ds.samples) {
      ids.push_back(s.id);
      sets.push_back(engine(s));
    }
  }
  return GroundTruth(ds.config.name, std::move(ids), std::move(sets));
}

// Distinct gate types used by a formula, top level included.
struct ScenarioTag {
  bool has_and = false;
  bool has_or = false;
  bool has_xor = false;

  std::string name() const {
    std::string out;
    auto add = [&out](bool present, const char* label) {
      if (!present) return;
      if (!out.empty()) out += '-';
      out += label;
    };
    add(has_and, "AND");
    add(has_or, "OR");
    add(has_xor, "XOR");
    return out;
  }
  bool operator==(const ScenarioTag&) const = default;
};

inline ScenarioTag scenario_of(const DatasetConfig& config) {
  config.validate();
  ScenarioTag tag;
  auto mark = [&tag](GateType t) {
    if (t == GateType::kAnd) tag.has_and = true;
    if (t == GateType::kOr) tag.has_or = true;
    if (t == GateType::kXor) tag.has_xor = true;
  };
  mark(config.top_level);
  if (!config.single_gate) {
    for (const auto& b : config.blocks) {
      if (b.n_gates > 0) mark(b.gate_type);
    }
  }
  return tag;
}

struct ClassTags {
  bool complementary = false;
  bool redundant = false;
  bool operator==(const ClassTags&) const = default;
};

// Complementary: every derivation of the class passes through an
// all-inputs gate case (positive AND, negative OR at the top level).
// Redundant: some derivation admits a single-input gate case, either at the
// top level or in an inner gate whose output the class requires.
inline ClassTags class_information_tags(const DatasetConfig& config, int cls) {
  require(cls == 0 || cls == 1, "class must be 0 or 1");
  config.validate();
  ClassTags tags;
  const bool positive = cls == 1;
  const GateType top = config.top_level;
  if (top == GateType::kXor) return tags;
  const bool top_complementary = (top == GateType::kAnd) == positive;
  if (!top_complementary) {
    tags.redundant = true;
    return tags;
  }
  tags.complementary = true;
  if (!config.single_gate) {
    // top AND true forces every inner gate true; top OR false forces every
    // inner gate false
    for (const auto& b : config.blocks) {
      if (b.n_gates == 0) continue;
      if (positive && b.gate_type == GateType::kOr) tags.redundant = true;
      if (!positive && b.gate_type == GateType::kAnd) tags.redundant = true;
    }
  }
  return tags;
}

inline constexpr std::string_view kTruthFormat = "andor-truth/1";

inline nlohmann::json position_sets_json(const std::vector<PositionSet>& sets) {
  nlohmann::json out = nlohmann::json::array();
  for (PositionSet s : sets) out.push_back(s.positions());
  return out;
}

inline std::string serialize_ground_truth(const GroundTruth& truth,
                                          const std::string& dataset_hash_hex) {
  std::string out;
  nlohmann::json header = {{"format", std::string(kTruthFormat)},
                           {"dataset", {{"name", truth.dataset_name()},
                                        {"hash", dataset_hash_hex}}},
                           {"count", truth.size()}};
  out += header.dump() + "\n";
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const PrimeSets& p = truth.sets()[i];
    nlohmann::json rec = {{"id", truth.ids()[i]},
                          {"prime_sets", position_sets_json(p.primes)},
                          {"r_min", position_sets_json(p.r_min)},
                          {"r_max", p.r_max.positions()}};
    out += rec.dump() + "\n";
  }
  return out;
}

inline GroundTruth parse_ground_truth(const std::string& text,
                                      const std::string& expected_hash) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "empty ground-truth file");
  std::string name;
  std::vector<std::int64_t> ids;
  std::vector<PrimeSets> sets;
  try {
    auto header = nlohmann::json::parse(line);
    require(header.at("format").get<std::string>() == kTruthFormat,
            "unknown ground-truth format");
    const auto hash = header.at("dataset").at("hash").get<std::string>();
    if (hash != expected_hash) {
      throw IntegrityError("ground truth was computed for dataset hash " + hash +
                           " but the dataset hash is " + expected_hash);
    }
    name = header.at("dataset").at("name").get<std::string>();
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto rec = nlohmann::json::parse(line);
      std::vector<PositionSet> primes;
      for (const auto& p : rec.at("prime_sets")) {
        primes.push_back(PositionSet::from_positions(p.get<std::vector<int>>()));
      }
      ids.push_back(rec.at("id").get<std::int64_t>());
      sets.push_back(PrimeSets::from_primes(std::move(primes)));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed ground-truth file: ") + e.what());
  }
  return GroundTruth(name, std::move(ids), std::move(sets));
}

}  // namespace andor

#endif  // ANDOR_GROUND_TRUTH_HPP
