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

// Command line front end for the ANDOR benchmark pipeline.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "andor/pipeline.hpp"

namespace {

struct Flags {
  std::string config;
  std::vector<std::string> presets;
  std::vector<std::string> methods;
  std::vector<std::string> external;
  std::string mode;
  std::string filter;
  std::string out;
  std::string name;
  std::string retrain;
  std::string split;
  std::vector<double> thresholds;
  int folds = 0;
  int max_epochs = -1;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

andor::RunConfig build_config(const Flags& f, const CLI::App& app) {
  andor::RunConfig c = f.config.empty() ? andor::RunConfig{} : andor::read_run_config(f.config);
  if (!f.presets.empty()) c.presets = f.presets;
  if (!f.methods.empty()) c.methods = f.methods;
  for (const auto& p : f.external) c.external.push_back({p, std::nullopt, std::nullopt});
  if (!f.mode.empty()) c.mode = f.mode;
  if (!f.filter.empty()) c.filter = f.filter;
  if (!f.out.empty()) c.out = f.out;
  if (!f.name.empty()) c.name = f.name;
  if (!f.retrain.empty()) c.retrain = f.retrain;
  if (!f.thresholds.empty()) c.thresholds = f.thresholds;
  if (f.folds > 0) c.folds = f.folds;
  if (f.max_epochs >= 0) c.train.max_epochs = f.max_epochs;
  if (app.count("--seed") > 0) c.seed = f.seed;
  if (f.split == "split") c.split_test = {true};
  if (f.split == "nosplit") c.split_test = {false};
  if (f.split == "both") c.split_test = {true, false};
  return c;
}

void print_summary(const andor::RunState& run, const std::string& stage) {
  std::printf("%s: done, run directory %s\n", stage.c_str(), run.dir().string().c_str());
  const auto warnings = run.dir() / "tables" / "warnings.txt";
  if (stage == "rank" || stage == "all") {
    if (std::filesystem::exists(warnings)) std::printf("%s", andor::read_file(warnings).c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ANDOR saliency benchmark"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "RunState configuration file (JSON)");
  app.add_option("--preset", f.presets, "Dataset preset(s), comma separated")->delimiter(',');
  app.add_option("--methods", f.methods, "Built-in methods, comma separated")->delimiter(',');
  app.add_option("--external", f.external, "External saliency file(s)")->delimiter(',');
  app.add_option("--mode", f.mode, "Interpretation mode for every method")
      ->check(CLI::IsMember({"AsIs", "Cutoff", "Absolute"}));
  app.add_option("--folds", f.folds, "Cross-validation folds")->check(CLI::Range(2, 100));
  app.add_option("--seed", f.seed, "Master seed");
  app.add_option("--filter", f.filter, "Ranking filter")
      ->check(CLI::IsMember({"split100", "all"}));
  app.add_option("--thresholds", f.thresholds, "Average-factor thresholds, comma separated")
      ->delimiter(',');
  app.add_option("--out", f.out, "Output root directory");
  app.add_option("--name", f.name, "RunState name (directory under the output root)");
  app.add_option("--retrain", f.retrain, "Validation model")
      ->check(CLI::IsMember({"mlp", "logic"}));
  app.add_option("--split", f.split, "Split modes")
      ->check(CLI::IsMember({"split", "nosplit", "both"}));
  app.add_option("--max-epochs", f.max_epochs, "Training epoch cap");

  const std::vector<std::pair<std::string, std::string>> stages = {
      {"gen", "Enumerate datasets"},
      {"truth", "Compute prime-set ground truth"},
      {"train", "Train surrogate models"},
      {"attr", "Compute built-in attributions"},
      {"eval", "Mask, retrain and compute metrics"},
      {"gcr", "Build global coherence representations"},
      {"rank", "Aggregate reports and ranking tables"},
      {"all", "RunState every stage"}};
  for (const auto& [name, help] : stages) app.add_subcommand(name, help);
  app.add_subcommand("presets", "List dataset presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(andor::ExitCode::kValidation);
  }

  try {
    if (app.got_subcommand("presets")) {
      for (const auto& p : andor::preset_names()) std::printf("%s\n", p.c_str());
      return 0;
    }
    andor::RunState run(build_config(f, app));
    for (const auto& [name, help] : stages) {
      if (!app.got_subcommand(name)) continue;
      if (name == "gen") andor::cmd_gen(run);
      if (name == "truth") andor::cmd_truth(run);
      if (name == "train") andor::cmd_train(run);
      if (name == "attr") andor::cmd_attr(run);
      if (name == "eval") andor::cmd_eval(run);
      if (name == "gcr") andor::cmd_gcr(run);
      if (name == "rank") andor::cmd_rank(run);
      if (name == "all") andor::cmd_all(run);
      print_summary(run, name);
    }
  } catch (const andor::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(e.code());
  }
  return 0;
}
