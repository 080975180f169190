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

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <filesystem>

#include "andor/ranking.hpp"

namespace andor {
namespace {

using ::testing::ElementsAre;

std::vector<MetricValue> V(std::initializer_list<double> xs) {
  return std::vector<MetricValue>(xs.begin(), xs.end());
}

TEST(CompetitionRankTest, Examples) {
  EXPECT_THAT(competition_ranks(V({4.56, 4.56, 5.00}), Direction::kLowerBetter),
              ElementsAre(1, 1, 3));
  EXPECT_THAT(competition_ranks(V({2, 2, 2}), Direction::kLowerBetter), ElementsAre(1, 1, 1));
  EXPECT_THAT(competition_ranks(V({76.48, 74.62}), Direction::kHigherBetter), ElementsAre(1, 2));
  std::vector<MetricValue> gap = {3.0, std::nullopt, 1.0};
  EXPECT_THAT(competition_ranks(gap, Direction::kLowerBetter), ElementsAre(2, 3, 1));
}

TEST(CompetitionRankTest, MonotoneTransformKeepsRanks) {
  auto base = V({0.3, 0.1, 0.9, 0.1, 0.5});
  std::vector<MetricValue> cubed;
  for (const auto& v : base) cubed.emplace_back(std::pow(*v, 3) * 7 + 1);
  EXPECT_EQ(competition_ranks(base, Direction::kHigherBetter),
            competition_ranks(cubed, Direction::kHigherBetter));
}

MetricReport Report(const std::string& method, const std::string& scenario, double base) {
  MetricReport r;
  r.dataset = "d";
  r.scenario = scenario;
  r.method = method;
  r.base_full_accuracy = true;
  for (const auto& m : ranking_metrics()) metric_ref(r, m.key) = base;
  return r;
}

TEST(AverageScoresTest, MeansAndFilters) {
  std::vector<MetricReport> reports = {Report("A", "AND", 40), Report("A", "AND", 60),
                                       Report("B", "AND", 10)};
  reports.push_back(Report("B", "AND", 1000));
  reports.back().base_full_accuracy = false;
  auto t = average_scores(reports, ReportFilter{});
  EXPECT_EQ(*t.at("nib_full", "A"), 50.0);
  EXPECT_EQ(*t.at("nib_full", "B"), 10.0);
  ReportFilter all{false, false, std::nullopt};
  EXPECT_EQ(*average_scores(reports, all).at("nib_full", "B"), 505.0);
  ReportFilter none{true, true, std::string("XOR")};
  EXPECT_THROW(average_scores(reports, none), ValidationError);
}

TEST(RankTest, PermutingMethodsPermutesRanks) {
  std::vector<MetricReport> reports = {Report("A", "AND", 3), Report("B", "AND", 1),
                                       Report("C", "AND", 2)};
  auto ranks = rank_methods(average_scores(reports, ReportFilter{}));
  std::vector<MetricReport> shuffled = {reports[2], reports[0], reports[1]};
  auto ranks2 = rank_methods(average_scores(shuffled, ReportFilter{}));
  for (const auto& m : {"A", "B", "C"}) {
    EXPECT_EQ(ranks.at("nib_full", m), ranks2.at("nib_full", m));
    EXPECT_EQ(ranks.at("gtm_fidelity", m), ranks2.at("gtm_fidelity", m));
  }
  EXPECT_EQ(*ranks.at("nib_full", "B"), 1.0);
  EXPECT_EQ(*ranks.at("gtm_fidelity", "A"), 1.0);
}

TEST(ScenarioTest, SingleScenarioOverallEqualsThatScenario) {
  std::vector<MetricReport> reports = {Report("A", "OR", 3), Report("B", "OR", 1)};
  reports[0].gtm_fidelity = 90;
  auto s = scenario_rank_table(reports, ReportFilter{});
  EXPECT_EQ(s.table.rows.front(), "OR");
  EXPECT_EQ(s.table.row("OR"), s.table.row(kAvgRankRow));
  EXPECT_EQ(s.warnings.size(), 6u);
}

std::string Fixture(const char* name) {
  return read_file(std::filesystem::path(ANDOR_FIXTURE_DIR) / name);
}

void ExpectTwoDecimals(const Table& actual, const Table& expected) {
  ASSERT_EQ(actual.rows, expected.rows);
  ASSERT_EQ(actual.cols, expected.cols);
  for (std::size_t r = 0; r < actual.rows.size(); ++r) {
    for (std::size_t c = 0; c < actual.cols.size(); ++c) {
      EXPECT_EQ(format_2dp(*actual.cells[r][c]), format_2dp(*expected.cells[r][c]))
          << actual.rows[r] << " / " << actual.cols[c];
    }
  }
}

TEST(FixtureTest, PropertyRanksFromAverageScores) {
  auto scores = score_table_from_csv(Fixture("avg_scores.csv"));
  auto groups = property_group_ranks(rank_methods(scores));
  ExpectTwoDecimals(groups, table_from_csv(Fixture("property_ranks_expected.csv")));
  EXPECT_EQ(*groups.at("Information capturing", "IntegratedGradients"), 1.25);
  EXPECT_EQ(*groups.at("Global differentiability", "LRP-Rollout"), 2.5);
}

TEST(FixtureTest, ScenarioAverageAndOverall) {
  auto table = scenario_overall(table_from_csv(Fixture("scenario_ranks.csv")));
  ExpectTwoDecimals(table, table_from_csv(Fixture("scenario_ranks_expected.csv")));
  EXPECT_EQ(format_2dp(*table.at("AND-OR-XOR", "Attention")), "3.38");
  EXPECT_EQ(*table.at(kOverallRow, "IntegratedGradients"), 1.0);
}

TEST(EmitTest, FormatsAreDeterministicAndCsvRoundTrips) {
  auto scores = score_table_from_csv(Fixture("avg_scores.csv"));
  auto md = table_to_markdown(scores);
  EXPECT_EQ(std::count(md.begin(), md.end(), '\n'), 12);  // header, rule, 10 rows
  EXPECT_EQ(table_from_csv(table_to_csv(scores)), scores);
  EXPECT_EQ(score_table_from_csv(table_to_csv(scores)), scores);
  auto dir = std::filesystem::temp_directory_path() / "andor_emit_test";
  std::filesystem::remove_all(dir);
  auto files = emit_report({{"avg_scores", scores}}, dir,
                           {ReportFormat::kMarkdown, ReportFormat::kCsv, ReportFormat::kHeatmap});
  ASSERT_EQ(files.size(), 3u);
  const auto first = read_file(files[2]);
  emit_report({{"avg_scores", scores}}, dir, {ReportFormat::kHeatmap});
  EXPECT_EQ(read_file(files[2]), first);
  EXPECT_EQ(std::count(first.begin(), first.end(), '\n'), 141);
  std::filesystem::remove_all(dir);
}

TEST(EmitTest, HalfUpRounding) {
  EXPECT_EQ(format_2dp(3.375), "3.38");
  EXPECT_EQ(format_2dp(4.5625), "4.56");
  EXPECT_EQ(format_2dp(8.125), "8.13");
  EXPECT_EQ(format_2dp(1), "1.00");
}

TEST(ClassInformationTest, AveragesTaggedClasses) {
  MetricReport r = Report("A", "AND", 0);
  r.class_info = {2, 1};  // class 0 redundant, class 1 complementary
  r.nib_class0 = 10;
  r.nib_class1 = 30;
  r.gib_class0 = 5;
  auto t = class_information_table({r}, ReportFilter{});
  EXPECT_EQ(*t.at("Complementary NIB", "A"), 30.0);
  EXPECT_EQ(*t.at("Redundant NIB", "A"), 10.0);
  EXPECT_EQ(*t.at("Redundant GIB", "A"), 5.0);
  EXPECT_FALSE(t.at("Complementary GIB", "A").has_value());
}

}  // namespace
}  // namespace andor
