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

#ifndef ANDOR_RANKING_HPP
#define ANDOR_RANKING_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "andor/common.hpp"
#include "andor/hash.hpp"
#include "andor/metrics.hpp"

namespace andor {

enum class Direction : std::uint8_t { kLowerBetter, kHigherBetter };

struct RankingMetric {
  std::string key;    // MetricReport field
  std::string label;  // table label
  Direction direction;
  std::string group;
};

// The ten ranked metrics, in table order.
inline const std::vector<RankingMetric>& ranking_metrics() {
  using D = Direction;
  static const std::vector<RankingMetric> kMetrics = {
      {"nib_balanced", "NIB Bal", D::kLowerBetter, "Information capturing"},
      {"gib_balanced", "GIB Bal", D::kLowerBetter, "Information capturing"},
      {"nib_full", "NIB Full", D::kLowerBetter, "Information capturing"},
      {"gib_full", "GIB Full", D::kLowerBetter, "Information capturing"},
      {"logical_acc_diff", "LogicalDiff", D::kLowerBetter, "Truthfulness of classification"},
      {"statistical_logical_acc_diff", "StatLogicalDiff", D::kLowerBetter,
       "Truthfulness of classification"},
      {"full_dca_t1.0", "Full DCA", D::kLowerBetter, "Information leakage"},
      {"minimal_dca", "Minimal DCA", D::kLowerBetter, "Information leakage"},
      {"fcam_fidelity", "GCR FCAM Acc.", D::kHigherBetter, "Global differentiability"},
      {"gtm_fidelity", "GCR GTM Acc.", D::kHigherBetter, "Global differentiability"},
  };
  return kMetrics;
}

inline const std::vector<std::string>& property_groups() {
  static const std::vector<std::string> kGroups = {
      "Information capturing", "Truthfulness of classification", "Information leakage",
      "Global differentiability"};
  return kGroups;
}

inline const RankingMetric& ranking_metric(std::string_view key) {
  for (const auto& m : ranking_metrics()) {
    if (m.key == key || m.label == key) return m;
  }
  throw ValidationError("unknown ranking metric '" + std::string(key) + "'");
}

// Scenario order used for scenario tables; the class-information subsets
// (complementary, redundant) are reported separately.
inline const std::vector<std::string>& scenario_order() {
  static const std::vector<std::string> kScenarios = {"AND",     "OR",     "XOR",       "AND-OR",
                                                      "AND-XOR", "OR-XOR", "AND-OR-XOR"};
  return kScenarios;
}

// Labelled matrix of optional values.
struct Table {
  std::string corner;
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<std::vector<MetricValue>> cells;

  Table() = default;
  Table(std::string corner_label, std::vector<std::string> row_labels,
        std::vector<std::string> col_labels)
      : corner(std::move(corner_label)), rows(std::move(row_labels)), cols(std::move(col_labels)) {
    cells.assign(rows.size(), std::vector<MetricValue>(cols.size()));
  }

  std::size_t row_index(std::string_view name) const {
    auto it = std::find(rows.begin(), rows.end(), name);
    require(it != rows.end(), "no row '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - rows.begin());
  }
  std::size_t col_index(std::string_view name) const {
    auto it = std::find(cols.begin(), cols.end(), name);
    require(it != cols.end(), "no column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - cols.begin());
  }
  MetricValue& at(std::string_view row, std::string_view col) {
    return cells[row_index(row)][col_index(col)];
  }
  const MetricValue& at(std::string_view row, std::string_view col) const {
    return cells[row_index(row)][col_index(col)];
  }
  const std::vector<MetricValue>& row(std::string_view name) const {
    return cells[row_index(name)];
  }

  bool operator==(const Table&) const = default;
};

// Values closer than this are ties.
inline constexpr double kTieTolerance = 1e-9;

// Competition ranks ("1224"): ties share the best rank, the next rank
// skips. Missing values rank after every present value.
inline std::vector<double> competition_ranks(const std::vector<MetricValue>& values,
                                             Direction direction) {
  std::vector<double> out(values.size());
  std::size_t present = 0;
  for (const auto& v : values) present += v.has_value() ? 1 : 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i]) {
      out[i] = static_cast<double>(present + 1);
      continue;
    }
    std::size_t better = 0;
    for (const auto& other : values) {
      if (!other) continue;
      const double d = direction == Direction::kLowerBetter ? *values[i] - *other
                                                            : *other - *values[i];
      if (d > kTieTolerance) ++better;
    }
    out[i] = static_cast<double>(better + 1);
  }
  return out;
}

struct ReportFilter {
  bool split_test_only = true;
  bool full_accuracy_only = true;
  std::optional<std::string> scenario;

  bool accepts(const MetricReport& r) const {
    if (split_test_only && !r.split_test) return false;
    if (full_accuracy_only && !r.base_full_accuracy) return false;
    if (scenario && r.scenario != *scenario) return false;
    return true;
  }
};

// Methods in order of first appearance.
inline std::vector<std::string> methods_of(const std::vector<MetricReport>& reports) {
  std::vector<std::string> out;
  for (const auto& r : reports) {
    if (std::find(out.begin(), out.end(), r.method) == out.end()) out.push_back(r.method);
  }
  return out;
}

// Mean of each ranked metric per method (rows metrics, columns methods).
inline Table average_scores(const std::vector<MetricReport>& reports, const ReportFilter& filter,
                            std::vector<std::string> methods = {}) {
  std::vector<MetricReport> kept;
  for (const auto& r : reports) {
    if (filter.accepts(r)) kept.push_back(r);
  }
  require(!kept.empty(), "no metric reports left after filtering");
  if (methods.empty()) methods = methods_of(kept);
  std::vector<std::string> keys;
  for (const auto& m : ranking_metrics()) keys.push_back(m.key);
  Table t("metric", keys, methods);
  for (std::size_t r = 0; r < keys.size(); ++r) {
    for (std::size_t c = 0; c < methods.size(); ++c) {
      double sum = 0.0;
      int n = 0;
      for (const auto& rep : kept) {
        if (rep.method != methods[c]) continue;
        const auto v = metric_value(rep, keys[r]);
        if (!v) continue;
        sum += *v;
        ++n;
      }
      if (n > 0) t.cells[r][c] = sum / n;
    }
  }
  return t;
}

// Per-metric competition ranks across methods, in each metric's direction.
inline Table rank_methods(const Table& scores) {
  Table out = scores;
  out.corner = "rank";
  for (std::size_t r = 0; r < scores.rows.size(); ++r) {
    const auto ranks = competition_ranks(scores.cells[r], ranking_metric(scores.rows[r]).direction);
    for (std::size_t c = 0; c < ranks.size(); ++c) out.cells[r][c] = ranks[c];
  }
  return out;
}

inline constexpr std::string_view kAvgRankRow = "Avg. Rank";
inline constexpr std::string_view kOverallRow = "Overall Ranking";

// Appends the column means of `rows` as "Avg. Rank" and their competition
// ranking as "Overall Ranking".
inline void append_average_and_overall(Table& t, const std::vector<std::size_t>& rows) {
  std::vector<MetricValue> avg(t.cols.size());
  for (std::size_t c = 0; c < t.cols.size(); ++c) {
    double sum = 0.0;
    for (std::size_t r : rows) {
      require(t.cells[r][c].has_value(), "missing rank in row '" + t.rows[r] + "'");
      sum += *t.cells[r][c];
    }
    avg[c] = sum / static_cast<double>(rows.size());
  }
  const auto overall = competition_ranks(avg, Direction::kLowerBetter);
  t.rows.emplace_back(kAvgRankRow);
  t.cells.push_back(avg);
  t.rows.emplace_back(kOverallRow);
  std::vector<MetricValue> row(overall.begin(), overall.end());
  t.cells.push_back(row);
}

// Mean rank per property group, then the average and overall ranking.
inline Table property_group_ranks(const Table& ranks) {
  Table out("property", property_groups(), ranks.cols);
  for (std::size_t g = 0; g < property_groups().size(); ++g) {
    std::vector<std::size_t> members;
    for (const auto& m : ranking_metrics()) {
      if (m.group == property_groups()[g]) members.push_back(ranks.row_index(m.key));
    }
    for (std::size_t c = 0; c < ranks.cols.size(); ++c) {
      double sum = 0.0;
      for (std::size_t r : members) sum += *ranks.cells[r][c];
      out.cells[g][c] = sum / static_cast<double>(members.size());
    }
  }
  std::vector<std::size_t> all(property_groups().size());
  for (std::size_t g = 0; g < all.size(); ++g) all[g] = g;
  append_average_and_overall(out, all);
  return out;
}

// Scenario rows of average ranks; adds the mean over scenarios and the
// overall ranking.
inline Table scenario_overall(Table per_scenario) {
  std::vector<std::size_t> rows(per_scenario.rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;
  append_average_and_overall(per_scenario, rows);
  return per_scenario;
}

struct ScenarioRanking {
  Table table;
  std::vector<std::string> warnings;
};

// Per scenario: average scores, per-metric ranks, property-group ranks and
// their average; then the mean over scenarios and the overall ranking.
inline ScenarioRanking scenario_rank_table(const std::vector<MetricReport>& reports,
                                           ReportFilter filter) {
  ScenarioRanking out;
  std::vector<std::string> methods;
  for (const auto& r : reports) {
    if (filter.accepts(r) &&
        std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
      methods.push_back(r.method);
    }
  }
  require(!methods.empty(), "no metric reports left after filtering");
  Table t("scenario", {}, methods);
  for (const auto& scenario : scenario_order()) {
    ReportFilter f = filter;
    f.scenario = scenario;
    const bool any = std::any_of(reports.begin(), reports.end(),
                                 [&f](const MetricReport& r) { return f.accepts(r); });
    if (!any) {
      out.warnings.push_back("scenario " + scenario + " has no datasets; row omitted");
      continue;
    }
    const Table groups = property_group_ranks(rank_methods(average_scores(reports, f, methods)));
    t.rows.push_back(scenario);
    t.cells.push_back(groups.row(kAvgRankRow));
  }
  require(!t.rows.empty(), "no scenario has any reports");
  out.table = scenario_overall(std::move(t));
  return out;
}

// Per-class NIB/GIB averaged over classes that need complementary or
// redundant information.
inline Table class_information_table(const std::vector<MetricReport>& reports,
                                     const ReportFilter& filter) {
  std::vector<MetricReport> kept;
  for (const auto& r : reports) {
    if (filter.accepts(r)) kept.push_back(r);
  }
  const auto methods = methods_of(kept);
  Table t("subset", {"Complementary NIB", "Complementary GIB", "Redundant NIB", "Redundant GIB"},
          methods);
  for (std::size_t c = 0; c < methods.size(); ++c) {
    std::array<double, 4> sum{};
    std::array<int, 4> n{};
    for (const auto& r : kept) {
      if (r.method != methods[c]) continue;
      for (int cls = 0; cls < 2; ++cls) {
        const MetricValue nv = cls == 0 ? r.nib_class0 : r.nib_class1;
        const MetricValue gv = cls == 0 ? r.gib_class0 : r.gib_class1;
        for (int bit = 0; bit < 2; ++bit) {
          if (!(r.class_info[cls] & (1 << bit))) continue;
          if (nv) sum[2 * bit] += *nv, ++n[2 * bit];
          if (gv) sum[2 * bit + 1] += *gv, ++n[2 * bit + 1];
        }
      }
    }
    for (int k = 0; k < 4; ++k) {
      if (n[k] > 0) t.cells[k][c] = sum[k] / n[k];
    }
  }
  return t;
}

// Half-up rounding to two decimals, as printed in tables.
inline std::string format_2dp(double v) {
  const double r = std::floor(v * 100.0 + 0.5 + 1e-9) / 100.0;
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", r);
  return buffer;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string table_to_csv(const Table& t) {
  std::string out = csv_escape(t.corner);
  for (const auto& c : t.cols) out += "," + csv_escape(c);
  out += "\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out += csv_escape(t.rows[r]);
    for (const auto& v : t.cells[r]) out += "," + (v ? format_double(*v) : std::string());
    out += "\n";
  }
  return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

inline Table table_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  do {
    require(static_cast<bool>(std::getline(in, line)), "empty table");
  } while (line.empty() || line[0] == '#');
  auto header = detail::split_csv_line(line);
  Table t;
  t.corner = header.front();
  t.cols.assign(header.begin() + 1, header.end());
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto fields = detail::split_csv_line(line);
    require(fields.size() == header.size(), "table row '" + fields.front() + "' has " +
                                                std::to_string(fields.size()) + " fields");
    t.rows.push_back(fields.front());
    std::vector<MetricValue> row;
    for (std::size_t k = 1; k < fields.size(); ++k) {
      if (fields[k].empty()) {
        row.emplace_back();
      } else {
        try {
          row.emplace_back(std::stod(fields[k]));
        } catch (const std::exception&) {
          throw ValidationError("not a number: '" + fields[k] + "'");
        }
      }
    }
    t.cells.push_back(std::move(row));
  }
  return t;
}

inline std::string table_to_markdown(const Table& t) {
  std::string out = "| " + t.corner + " |";
  for (const auto& c : t.cols) out += " " + c + " |";
  out += "\n|---|";
  for (std::size_t c = 0; c < t.cols.size(); ++c) out += "---:|";
  out += "\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out += "| " + t.rows[r] + " |";
    for (const auto& v : t.cells[r]) out += " " + (v ? format_2dp(*v) : std::string("-")) + " |";
    out += "\n";
  }
  return out;
}

// Long form: one (row, column, value) line per present cell.
inline std::string table_to_heatmap(const Table& t) {
  std::string out = "row,column,value\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t c = 0; c < t.cols.size(); ++c) {
      if (!t.cells[r][c]) continue;
      out += csv_escape(t.rows[r]) + "," + csv_escape(t.cols[c]) + "," +
             format_double(*t.cells[r][c]) + "\n";
    }
  }
  return out;
}

enum class ReportFormat : std::uint8_t { kMarkdown, kCsv, kHeatmap };

// Writes each named table in the requested formats; returns written paths.
inline std::vector<std::filesystem::path> emit_report(
    const std::vector<std::pair<std::string, Table>>& tables, const std::filesystem::path& dir,
    const std::vector<ReportFormat>& formats) {
  std::vector<std::filesystem::path> written;
  for (const auto& [name, table] : tables) {
    for (auto f : formats) {
      std::filesystem::path p;
      std::string body;
      switch (f) {
        case ReportFormat::kMarkdown:
          p = dir / "tables" / (name + ".md");
          body = table_to_markdown(table);
          break;
        case ReportFormat::kCsv:
          p = dir / "tables" / (name + ".csv");
          body = table_to_csv(table);
          break;
        case ReportFormat::kHeatmap:
          p = dir / "heatmaps" / (name + ".csv");
          body = table_to_heatmap(table);
          break;
      }
      write_file(p, body);
      written.push_back(p);
    }
  }
  return written;
}

// Reads a metrics x methods score table (rows keyed by metric key or
// label) into the canonical row order.
inline Table score_table_from_csv(const std::string& text) {
  Table raw = table_from_csv(text);
  std::vector<std::string> keys;
  for (const auto& m : ranking_metrics()) keys.push_back(m.key);
  Table t("metric", keys, raw.cols);
  for (std::size_t r = 0; r < raw.rows.size(); ++r) {
    const auto& m = ranking_metric(raw.rows[r]);
    t.cells[t.row_index(m.key)] = raw.cells[r];
  }
  return t;
}

}  // namespace andor

#endif  // ANDOR_RANKING_HPP
