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

#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <sstream>

#include "andor/pipeline.hpp"

namespace andor {
namespace {

namespace fs = std::filesystem;

fs::path Scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "andor_pipeline_test" / name;
  fs::remove_all(p);
  return p;
}

RunConfig SmallConfig(const fs::path& out) {
  RunConfig c;
  c.name = "run";
  c.presets = {"2inBinary-AND"};
  c.methods = {"oracle-min", "random"};
  c.folds = 2;
  c.seed = 7;
  c.out = out.string();
  return c;
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

// Every file below `root`, keyed by relative path.
std::map<std::string, std::string> Snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_file(e.path());
  }
  return out;
}

TEST(PipelineTest, AllStagesOnOneDatasetYieldOneRowPerMethodAndFold) {
  RunState run(SmallConfig(Scratch("all")));
  cmd_all(run);
  const auto csv = Lines(read_file(run.dir() / "metrics" / "reports.csv"));
  ASSERT_EQ(csv.size(), 1u + 2u * 2u);
  std::map<std::string, int> per_method;
  std::set<std::string> folds;
  for (std::size_t i = 1; i < csv.size(); ++i) {
    const auto cells = detail::split_csv_line(csv[i]);
    ++per_method[cells[2]];
    folds.insert(cells[3]);
  }
  EXPECT_EQ(per_method, (std::map<std::string, int>{{"OracleMin", 2}, {"Random", 2}}));
  EXPECT_EQ(folds, (std::set<std::string>{"0", "1"}));
  for (const char* table : {"average_scores", "metric_ranks", "property_ranks", "scenario_ranks",
                            "class_information"}) {
    EXPECT_TRUE(fs::exists(run.dir() / "tables" / (std::string(table) + ".md"))) << table;
    EXPECT_TRUE(fs::exists(run.dir() / "tables" / (std::string(table) + ".csv"))) << table;
  }
  // The oracle marks a minimal sufficient set, so no sample lacks one.
  for (const auto& r : reports_from_jsonl(read_file(run.dir() / "metrics" / "reports.jsonl"))) {
    if (r.method == "OracleMin") {
      EXPECT_EQ(r.nib_full, 0.0);
    }
    EXPECT_TRUE(r.gtm_fidelity.has_value());
    EXPECT_TRUE(r.full_dca_t10.has_value());
  }
  const auto manifest = nlohmann::json::parse(read_file(run.dir() / "manifest.json"));
  EXPECT_EQ(manifest.at("toolkit_version"), std::string(kToolkitVersion));
  EXPECT_TRUE(manifest.at("models").contains("2inBinary-AND/fold1"));
  for (const auto& [rel, a] : manifest.at("artifacts").items()) {
    EXPECT_EQ(file_sha256(run.dir() / rel), a.at("hash").get<std::string>()) << rel;
  }
}

TEST(PipelineTest, TamperedSaliencyIsRefused) {
  RunState run(SmallConfig(Scratch("tamper")));
  cmd_gen(run);
  cmd_truth(run);
  cmd_train(run);
  cmd_attr(run);
  const fs::path victim = run.dir() / "saliency" / "2inBinary-AND" / "fold0" / "Random.jsonl";
  std::string text = read_file(victim);
  text[text.size() - 5] = text[text.size() - 5] == '1' ? '2' : '1';
  write_file(victim, text);
  RunState again(SmallConfig(run.dir().parent_path()));
  EXPECT_THROW(cmd_eval(again), IntegrityError);
}

TEST(PipelineTest, DownstreamStageWithoutUpstreamIsRefused) {
  RunState run(SmallConfig(Scratch("missing")));
  EXPECT_THROW(cmd_train(run), IntegrityError);
}

TEST(PipelineTest, RerunIsANoOpAndRunsAreByteIdentical) {
  const fs::path a = Scratch("rerun_a");
  RunConfig ca = SmallConfig(a);
  ca.retrain = "logic";
  RunState first(ca);
  cmd_all(first);
  const auto before = Snapshot(first.dir());
  const auto stamp = fs::last_write_time(first.dir() / "manifest.json");
  RunState second(ca);
  cmd_all(second);
  EXPECT_EQ(Snapshot(second.dir()), before);
  EXPECT_EQ(fs::last_write_time(second.dir() / "manifest.json"), stamp);

  // Same configuration elsewhere: every artifact but the manifest's record
  // of the output root is identical.
  const fs::path b = Scratch("rerun_b");
  RunConfig cb = ca;
  cb.out = b.string();
  RunState other(cb);
  cmd_all(other);
  auto snap_b = Snapshot(other.dir());
  auto snap_a = before;
  snap_a.erase("manifest.json");
  snap_b.erase("manifest.json");
  EXPECT_EQ(snap_a, snap_b);
}

TEST(PipelineTest, DeletingDownstreamArtifactsKeepsUpstreamHashes) {
  RunConfig c = SmallConfig(Scratch("isolation"));
  c.retrain = "logic";
  RunState run(c);
  cmd_all(run);
  const auto before = Snapshot(run.dir());
  fs::remove_all(run.dir() / "metrics");
  fs::remove_all(run.dir() / "tables");
  RunState again(c);
  cmd_all(again);
  EXPECT_EQ(Snapshot(again.dir()), before);
}

TEST(PipelineTest, ChangedThresholdsInvalidateOnlyDownstreamStages) {
  RunConfig c = SmallConfig(Scratch("invalidate"));
  c.retrain = "logic";
  RunState run(c);
  cmd_all(run);
  const auto before = Snapshot(run.dir());
  c.thresholds = {1.0};
  RunState changed(c);
  cmd_all(changed);
  const auto after = Snapshot(changed.dir());
  for (const auto& [rel, bytes] : before) {
    if (rel.starts_with("datasets") || rel.starts_with("truth") || rel.starts_with("models") ||
        rel.starts_with("saliency") || rel.starts_with("gcr")) {
      EXPECT_EQ(after.at(rel), bytes) << rel;
    }
  }
  const auto r = reports_from_jsonl(after.at("metrics/reports.jsonl"));
  EXPECT_TRUE(r.front().full_dca_t10.has_value());
  EXPECT_FALSE(r.front().full_dca_t05.has_value());
}

TEST(PipelineTest, EnumerationBudgetIsEnforced) {
  RunConfig c = SmallConfig(Scratch("budget"));
  c.enumeration_budget = 100;
  RunState run(c);
  try {
    cmd_gen(run);
    FAIL() << "expected a budget error";
  } catch (const BudgetError& e) {
    EXPECT_EQ(e.required(), 256u);
    EXPECT_EQ(e.code(), ExitCode::kBudget);
  }
}

TEST(PipelineTest, ExternalSaliencyIsEvaluatedBestEffort) {
  const fs::path root = Scratch("external");
  RunConfig c = SmallConfig(root);
  c.methods = {"OracleMax"};
  c.retrain = "logic";
  c.folds = 2;
  RunState run(c);
  cmd_gen(run);
  const Dataset ds = parse_dataset(read_file(run.dir() / paths::dataset("2inBinary-AND")));
  const Partition part = split_dataset(ds, split_options(c, run_tasks(c).front()));
  // Scores for the test samples only: nothing to retrain on.
  SaliencyTensor t;
  t.method = "External";
  t.dataset_name = ds.config.name;
  t.dataset_hash = dataset_hash(ds);
  t.split = SplitTag::kTest;
  t.length = ds.length();
  t.raw = false;
  for (const auto& s : part.test.samples) {
    t.ids.push_back(s.id);
    t.scores.push_back(ds.inputs(s));
  }
  const fs::path ext = root / "external.jsonl";
  write_saliency(t, ext);
  c.external = {{ext.string(), 0, true}};
  RunState with_external(c);
  cmd_all(with_external);
  const auto reports =
      reports_from_jsonl(read_file(with_external.dir() / "metrics" / "reports.jsonl"));
  ASSERT_EQ(reports.size(), 3u);
  const auto it = std::find_if(reports.begin(), reports.end(),
                               [](const MetricReport& x) { return x.method == "External"; });
  ASSERT_NE(it, reports.end());
  const MetricReport& r = *it;
  EXPECT_EQ(r.fold, 0);
  EXPECT_TRUE(r.nib_full.has_value());
  EXPECT_FALSE(r.retrain_acc.has_value());
  EXPECT_FALSE(r.gtm_fidelity.has_value());

  // A file computed for another dataset version is refused.
  t.dataset_hash = std::string(64, '0');
  write_saliency(t, ext);
  RunConfig stale = c;
  RunState refused(stale);
  EXPECT_THROW(cmd_eval(refused), IntegrityError);
}

TEST(PipelineTest, FilterFallsBackToAllModelsWithWarning) {
  MetricReport r;
  r.dataset = "d";
  r.scenario = "AND";
  r.method = "M";
  r.base_full_accuracy = false;
  for (const auto& m : ranking_metrics()) metric_ref(r, m.key) = 1.0;
  const auto out = rank_reports({r}, "split100");
  ASSERT_FALSE(out.warnings.empty());
  EXPECT_NE(out.warnings.front().find("all models"), std::string::npos);
  EXPECT_EQ(out.tables.front().second.at("nib_full", "M"), 1.0);
}

TEST(RunConfigTest, JsonRoundTripAndStrictKeys) {
  RunConfig c = SmallConfig("/tmp/x");
  c.mode = "Absolute";
  c.modes["Random"] = "Cutoff";
  c.split_test = {true, false};
  c.datasets.push_back(preset("2inBinary-OR", 3));
  c.datasets.back().name = "custom";
  const RunConfig back = run_config_from_json(run_config_to_json(c));
  EXPECT_EQ(run_config_to_json(back), run_config_to_json(c));
  EXPECT_THROW(run_config_from_json({{"folds", 5}, {"fold", 3}}), ValidationError);
  RunConfig bad = c;
  bad.thresholds = {0.7};
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = c;
  bad.methods = {"NoSuchMethod"};
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(RunConfigTest, MethodNamesAndModes) {
  EXPECT_EQ(canonical_method("oracle-min"), "OracleMin");
  EXPECT_EQ(canonical_method("integrated_gradients"), "IntegratedGradients");
  RunConfig c;
  EXPECT_EQ(resolve_mode(c, "IntegratedGradients"), preset_mode("IntegratedGradients").value());
  c.mode = "Cutoff";
  EXPECT_EQ(resolve_mode(c, "Random"), InterpretationMode::kCutoff);
  c.modes["Random"] = "Absolute";
  EXPECT_EQ(resolve_mode(c, "Random"), InterpretationMode::kAbsolute);
}

}  // namespace
}  // namespace andor
