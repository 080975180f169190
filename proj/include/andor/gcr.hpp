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

#ifndef ANDOR_GCR_HPP
#define ANDOR_GCR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "andor/common.hpp"
#include "andor/dataset.hpp"
#include "andor/saliency.hpp"
#include "json.hpp"

namespace andor {

// SAX alphabet: v - 1 standard-normal quantile cut points and v numeric
// values evenly spaced over [-1, 1] (or [0, 1] on request).
struct SymbolAlphabet {
  int v = 2;
  std::vector<double> breakpoints;
  std::vector<double> numeric;

  static SymbolAlphabet make(int v, bool unit_interval = false) {
    require(v >= 2, "alphabet needs at least 2 symbols");
    SymbolAlphabet a;
    a.v = v;
    boost::math::normal standard;
    for (int k = 1; k < v; ++k) {
      a.breakpoints.push_back(boost::math::quantile(standard, static_cast<double>(k) / v));
    }
    for (int k = 0; k < v; ++k) {
      const double t = static_cast<double>(k) / (v - 1);
      a.numeric.push_back(unit_interval ? t : -1.0 + 2.0 * t);
    }
    return a;
  }
};

// Bin index per value: the index of the first breakpoint exceeding it.
inline std::vector<int> sax_symbolize(std::span<const double> series, const SymbolAlphabet& a) {
  std::vector<int> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    out[i] = static_cast<int>(std::upper_bound(a.breakpoints.begin(), a.breakpoints.end(),
                                               series[i]) -
                              a.breakpoints.begin());
  }
  return out;
}

// ANDOR inputs already lie on the numeric map: each value's symbol is its
// domain index.
inline std::vector<std::vector<int>> identity_symbols(const Dataset& ds) {
  std::vector<std::vector<int>> out;
  out.reserve(ds.size());
  for (const auto& s : ds.samples) out.emplace_back(s.codes.begin(), s.codes.end());
  return out;
}

enum class GcrVariant : std::uint8_t { kGtm, kFcam };

inline std::string_view to_string(GcrVariant v) { return v == GcrVariant::kGtm ? "GTM" : "FCAM"; }

// Class-wise average attribution per (position, symbol) for GTM, or per
// (position, position, symbol, symbol) for FCAM. Cells never observed are
// absent rather than zero.
class GcrModel {
 public:
  GcrModel() = default;
  GcrModel(GcrVariant variant, int symbols, int length)
      : variant_(variant), symbols_(symbols), length_(length) {
    require(symbols >= 1 && length >= 1, "GCR needs symbols and positions");
    for (int c = 0; c < 2; ++c) {
      sums_[c].assign(cells(), 0.0);
      counts_[c].assign(cells(), 0);
    }
  }

  GcrVariant variant() const { return variant_; }
  int symbols() const { return symbols_; }
  int length() const { return length_; }

  std::size_t cells() const {
    const auto l = static_cast<std::size_t>(length_);
    const auto v = static_cast<std::size_t>(symbols_);
    return variant_ == GcrVariant::kGtm ? l * v : l * l * v * v;
  }

  // Flat cell index: GTM (i, u); FCAM (i, j, u, w).
  std::size_t cell(int i, int u) const {
    return static_cast<std::size_t>(i) * symbols_ + u;
  }
  std::size_t cell(int i, int j, int u, int w) const {
    return ((static_cast<std::size_t>(i) * length_ + j) * symbols_ + u) * symbols_ + w;
  }

  void add(int cls, std::size_t cell_index, double score) {
    sums_[cls][cell_index] += score;
    counts_[cls][cell_index] += 1;
  }

  bool present(int cls, std::size_t c) const { return counts_[cls][c] > 0; }
  double value(int cls, std::size_t c) const {
    return sums_[cls][c] / static_cast<double>(counts_[cls][c]);
  }
  std::uint64_t count(int cls, std::size_t c) const { return counts_[cls][c]; }
  const std::vector<double>& sums(int cls) const { return sums_[cls]; }
  const std::vector<std::uint64_t>& counts(int cls) const { return counts_[cls]; }

  // Direct table access for hand-built models.
  void set(int cls, std::size_t c, double v) {
    sums_[cls][c] = v;
    counts_[cls][c] = 1;
  }
  void restore(int cls, std::size_t c, double sum, std::uint64_t count) {
    sums_[cls][c] = sum;
    counts_[cls][c] = count;
  }
  void clear(int cls, std::size_t c) {
    sums_[cls][c] = 0.0;
    counts_[cls][c] = 0;
  }

  // Membership ratio per class: the sample's cell values over the maximal
  // reachable score. Absent cells add nothing to the numerator; groups with
  // no present cell are skipped entirely. nullopt when a class has no
  // usable group at all.
  std::array<std::optional<double>, 2> membership(std::span<const int> symbols) const {
    require(static_cast<int>(symbols.size()) == length_, "symbol vector length mismatch");
    std::array<std::optional<double>, 2> out;
    for (int c = 0; c < 2; ++c) {
      double num = 0.0, den = 0.0;
      bool any = false;
      auto group = [&](std::size_t first, std::size_t stride, std::size_t n, std::size_t hit) {
        bool seen = false;
        double best = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const std::size_t idx = first + k * stride;
          if (!present(c, idx)) continue;
          const double v = value(c, idx);
          best = seen ? std::max(best, v) : v;
          seen = true;
        }
        if (!seen) return;
        any = true;
        den += best;
        if (present(c, hit)) num += value(c, hit);
      };
      if (variant_ == GcrVariant::kGtm) {
        for (int i = 0; i < length_; ++i) {
          group(cell(i, 0), 1, symbols_, cell(i, symbols[i]));
        }
      } else {
        const auto pairs = static_cast<std::size_t>(symbols_) * symbols_;
        for (int i = 0; i < length_; ++i) {
          for (int j = 0; j < length_; ++j) {
            group(cell(i, j, 0, 0), 1, pairs, cell(i, j, symbols[i], symbols[j]));
          }
        }
      }
      if (!any) continue;
      out[c] = den == 0.0 ? 0.0 : num / den;
    }
    return out;
  }

  // Larger membership wins; ties go to class 0; a class without any usable
  // cell loses. nullopt when neither class is usable.
  std::optional<int> classify(std::span<const int> symbols) const {
    const auto m = membership(symbols);
    if (!m[0] && !m[1]) return std::nullopt;
    if (!m[0]) return 1;
    if (!m[1]) return 0;
    return *m[1] > *m[0] ? 1 : 0;
  }

  bool operator==(const GcrModel&) const = default;

 private:
  GcrVariant variant_ = GcrVariant::kGtm;
  int symbols_ = 0;
  int length_ = 0;
  std::array<std::vector<double>, 2> sums_;
  std::array<std::vector<std::uint64_t>, 2> counts_;
};

// Builds a GTM (order-1 rows) or FCAM (order-2 rows). Each sample
// aggregates into its reference class. With thresholds given, scores at or
// below the sample's threshold are skipped (tGCR).
inline GcrModel build_gcr(GcrVariant variant, const std::vector<std::vector<int>>& symbols,
                          const std::vector<std::vector<double>>& rows,
                          std::span<const int> reference, int alphabet_size,
                          std::span<const double> thresholds = {}) {
  require(!symbols.empty(), "cannot build a GCR from an empty split");
  require(symbols.size() == rows.size() && symbols.size() == reference.size(),
          "symbols, scores and reference predictions differ in count");
  require(thresholds.empty() || thresholds.size() == symbols.size(),
          "threshold count mismatch");
  const int l = static_cast<int>(symbols.front().size());
  GcrModel model(variant, alphabet_size, l);
  for (std::size_t n = 0; n < symbols.size(); ++n) {
    const auto& sym = symbols[n];
    const auto& row = rows[n];
    const int cls = reference[n];
    require(cls == 0 || cls == 1, "reference class must be 0 or 1");
    require(static_cast<int>(sym.size()) == l, "symbol length mismatch");
    const bool thresholded = !thresholds.empty();
    if (variant == GcrVariant::kGtm) {
      require(static_cast<int>(row.size()) == l, "GTM needs order-1 scores");
      for (int i = 0; i < l; ++i) {
        if (thresholded && row[i] <= thresholds[n]) continue;
        model.add(cls, model.cell(i, sym[i]), row[i]);
      }
    } else {
      require(static_cast<int>(row.size()) == l * l, "FCAM needs order-2 scores");
      for (int i = 0; i < l; ++i) {
        for (int j = 0; j < l; ++j) {
          const double v = row[static_cast<std::size_t>(i) * l + j];
          if (thresholded && v <= thresholds[n]) continue;
          model.add(cls, model.cell(i, j, sym[i], sym[j]), v);
        }
      }
    }
  }
  return model;
}

struct FidelityResult {
  std::optional<double> fidelity;
  std::size_t undefined = 0;
};

// Agreement of GCR classification with reference predictions, in percent.
// Samples without a defined membership count as disagreements.
inline FidelityResult gcr_fidelity(const GcrModel& model,
                                   const std::vector<std::vector<int>>& symbols,
                                   std::span<const int> reference) {
  require(symbols.size() == reference.size(), "symbol and reference counts differ");
  FidelityResult r;
  if (symbols.empty()) return r;
  std::size_t hits = 0;
  for (std::size_t n = 0; n < symbols.size(); ++n) {
    const auto c = model.classify(symbols[n]);
    if (!c) {
      ++r.undefined;
      continue;
    }
    hits += *c == reference[n] ? 1 : 0;
  }
  r.fidelity = 100.0 * static_cast<double>(hits) / static_cast<double>(symbols.size());
  return r;
}

inline constexpr std::string_view kGcrFormat = "andor-gcr/1";

inline std::string serialize_gcr(const GcrModel& m) {
  std::string out = nlohmann::json({{"format", std::string(kGcrFormat)},
                                    {"variant", std::string(to_string(m.variant()))},
                                    {"symbols", m.symbols()},
                                    {"length", m.length()}})
                        .dump() +
                    "\n";
  for (int c = 0; c < 2; ++c) {
    out += "{\"class\":" + std::to_string(c) + ",\"sums\":[";
    for (std::size_t k = 0; k < m.cells(); ++k) {
      if (k) out += ',';
      out += format_double(m.sums(c)[k]);
    }
    out += "],\"counts\":[";
    for (std::size_t k = 0; k < m.cells(); ++k) {
      if (k) out += ',';
      out += std::to_string(m.counts(c)[k]);
    }
    out += "]}\n";
  }
  return out;
}

inline GcrModel parse_gcr(const std::string& text) {
  try {
    const auto nl = text.find('\n');
    require(nl != std::string::npos, "truncated GCR file");
    auto header = nlohmann::json::parse(text.substr(0, nl));
    require(header.at("format").get<std::string>() == kGcrFormat, "unknown GCR format");
    const auto variant = header.at("variant").get<std::string>() == "GTM" ? GcrVariant::kGtm
                                                                          : GcrVariant::kFcam;
    GcrModel m(variant, header.at("symbols").get<int>(), header.at("length").get<int>());
    std::size_t begin = nl + 1;
    for (int c = 0; c < 2; ++c) {
      const auto end = text.find('\n', begin);
      require(end != std::string::npos, "truncated GCR file");
      auto rec = nlohmann::json::parse(text.substr(begin, end - begin));
      const auto sums = rec.at("sums").get<std::vector<double>>();
      const auto counts = rec.at("counts").get<std::vector<std::uint64_t>>();
      require(sums.size() == m.cells() && counts.size() == m.cells(), "GCR table shape mismatch");
      for (std::size_t k = 0; k < m.cells(); ++k) {
        m.restore(c, k, sums[k], counts[k]);
      }
      begin = end + 1;
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed GCR file: ") + e.what());
  }
}

// Long-form CSV of the averaged tables for heatmaps: one row per present
// cell.
inline std::string gcr_heatmap_csv(const GcrModel& m) {
  std::string out = m.variant() == GcrVariant::kGtm ? "class,position,symbol,value,count\n"
                                                    : "class,i,j,u,w,value,count\n";
  for (int c = 0; c < 2; ++c) {
    for (std::size_t k = 0; k < m.cells(); ++k) {
      if (!m.present(c, k)) continue;
      std::vector<std::size_t> digits;
      std::size_t rest = k;
      const std::size_t v = m.symbols();
      const std::size_t l = m.length();
      if (m.variant() == GcrVariant::kGtm) {
        digits = {rest / v, rest % v};
      } else {
        const std::size_t w = rest % v;
        rest /= v;
        const std::size_t u = rest % v;
        rest /= v;
        digits = {rest / l, rest % l, u, w};
      }
      out += std::to_string(c);
      for (auto d : digits) out += "," + std::to_string(d);
      out += "," + format_double(m.value(c, k)) + "," + std::to_string(m.count(c, k)) + "\n";
    }
  }
  return out;
}

}  // namespace andor

#endif  // ANDOR_GCR_HPP
