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

#ifndef ANDOR_PIPELINE_HPP
#define ANDOR_PIPELINE_HPP

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "andor/dataset.hpp"
#include "andor/dataset_io.hpp"
#include "andor/gcr.hpp"
#include "andor/ground_truth.hpp"
#include "andor/hash.hpp"
#include "andor/masked_dataset.hpp"
#include "andor/metrics.hpp"
#include "andor/ranking.hpp"
#include "andor/saliency.hpp"
#include "andor/saliency_io.hpp"
#include "andor/surrogate.hpp"
#include "json.hpp"

namespace andor {

inline constexpr std::string_view kToolkitVersion = "1.0.0";
inline constexpr std::string_view kManifestFormat = "andor-manifest/1";
inline constexpr std::string_view kRunConfigFormat = "andor-run/1";

// An externally computed saliency file. It applies to the dataset named in
// its header, for every configured split mode and fold unless narrowed.
struct ExternalSaliency {
  std::string path;
  std::optional<int> fold;
  std::optional<bool> split_test;

  bool operator==(const ExternalSaliency&) const = default;
};

struct RunConfig {
  std::string name = "default";
  std::vector<std::string> presets;
  std::vector<DatasetConfig> datasets;
  int nr_baseline = 2;
  std::vector<std::string> methods = {"OracleMin", "OracleMax", "Random"};
  std::vector<ExternalSaliency> external;
  // Global interpretation-mode override, then per-method overrides.
  std::optional<std::string> mode;
  std::map<std::string, std::string> modes;
  int folds = 5;
  // Split modes to run: true holds out a test set, false trains and
  // evaluates on every sample.
  std::vector<bool> split_test = {true};
  std::uint64_t seed = 0;
  // "split100": split-test runs whose model reached 100% test accuracy.
  // "all": every run.
  std::string filter = "split100";
  std::vector<double> thresholds = {1.0, 0.8, 0.5};
  // "mlp" retrains the surrogate on masked data; "logic" substitutes the
  // exact formula evaluator.
  std::string retrain = "mlp";
  int seed_attempts = 5;
  TrainConfig train;
  int ig_steps = 64;
  double alpha = 0.05;
  std::string truth_method = "analytic";
  std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
  std::string out = "runs";

  std::vector<DatasetConfig> all_datasets() const {
    std::vector<DatasetConfig> out_configs;
    for (const auto& p : presets) out_configs.push_back(preset(p, nr_baseline));
    out_configs.insert(out_configs.end(), datasets.begin(), datasets.end());
    return out_configs;
  }

  void validate() const;
};

// Canonical built-in method name for a user spelling ("oracle-min",
// "oracle_min" and "OracleMin" are the same method).
inline std::string canonical_method(std::string_view name) {
  auto fold_name = [](std::string_view s) {
    std::string out;
    for (char c : s) {
      if (c == '-' || c == '_' || c == ' ') continue;
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
  };
  const std::string key = fold_name(name);
  for (const auto& m : builtin_methods()) {
    if (fold_name(m) == key) return m;
  }
  throw ValidationError("unknown method '" + std::string(name) + "'");
}

inline void RunConfig::validate() const {
  require(!name.empty() && name.find('/') == std::string::npos && name != "." && name != "..",
          "run name must be a plain directory name");
  require(!presets.empty() || !datasets.empty(), "no datasets configured");
  std::set<std::string> names;
  for (const auto& d : all_datasets()) {
    d.validate();
    require(names.insert(d.name).second, "dataset '" + d.name + "' configured twice");
  }
  require(!methods.empty() || !external.empty(), "no methods configured");
  std::set<std::string> seen;
  for (const auto& m : methods) {
    require(seen.insert(canonical_method(m)).second, "method '" + m + "' configured twice");
  }
  if (mode) parse_interpretation_mode(*mode);
  for (const auto& [m, v] : modes) parse_interpretation_mode(v);
  require(!split_test.empty(), "no split mode configured");
  if (std::count(split_test.begin(), split_test.end(), true) > 0) {
    require(folds >= 2, "folds must be at least 2");
  }
  require(filter == "split100" || filter == "all", "filter must be 'split100' or 'all'");
  for (double t : thresholds) {
    require(t == 1.0 || t == 0.8 || t == 0.5, "thresholds must be drawn from {1.0, 0.8, 0.5}");
  }
  require(retrain == "mlp" || retrain == "logic", "retrain must be 'mlp' or 'logic'");
  require(seed_attempts >= 1, "seed attempts must be at least 1");
  train.validate();
  require(ig_steps >= 1, "integrated-gradients steps must be positive");
  require(alpha > 0 && alpha < 1, "alpha must lie in (0, 1)");
  require(truth_method == "analytic" || truth_method == "bruteforce",
          "truth method must be 'analytic' or 'bruteforce'");
  for (const auto& e : external) {
    require(std::filesystem::exists(e.path), "external saliency file not found: " + e.path);
  }
}

inline nlohmann::json run_config_to_json(const RunConfig& c) {
  nlohmann::json datasets = nlohmann::json::array();
  for (const auto& d : c.datasets) datasets.push_back(config_to_json(d));
  nlohmann::json external = nlohmann::json::array();
  for (const auto& e : c.external) {
    nlohmann::json j = {{"path", e.path}};
    if (e.fold) j["fold"] = *e.fold;
    if (e.split_test) j["split_test"] = *e.split_test;
    external.push_back(j);
  }
  return {{"format", std::string(kRunConfigFormat)},
          {"name", c.name},
          {"presets", c.presets},
          {"datasets", datasets},
          {"nr_baseline", c.nr_baseline},
          {"methods", c.methods},
          {"external", external},
          {"mode", c.mode ? nlohmann::json(*c.mode) : nlohmann::json(nullptr)},
          {"modes", c.modes},
          {"folds", c.folds},
          {"split_test", c.split_test},
          {"seed", c.seed},
          {"filter", c.filter},
          {"thresholds", c.thresholds},
          {"retrain", c.retrain},
          {"seed_attempts", c.seed_attempts},
          {"train",
           {{"hidden", c.train.hidden},
            {"learning_rate", c.train.learning_rate},
            {"momentum", c.train.momentum},
            {"max_epochs", c.train.max_epochs},
            {"loss_tolerance", c.train.loss_tolerance}}},
          {"ig_steps", c.ig_steps},
          {"alpha", c.alpha},
          {"truth_method", c.truth_method},
          {"enumeration_budget", c.enumeration_budget},
          {"out", c.out}};
}

// Every field is optional and defaults as in RunConfig; unknown keys are
// rejected so that typos cannot silently fall back to defaults.
inline RunConfig run_config_from_json(const nlohmann::json& j) {
  static const std::set<std::string> kKeys = {
      "format", "name", "presets", "datasets", "nr_baseline", "methods", "external",
      "mode", "modes", "folds", "split_test", "seed", "filter", "thresholds", "retrain",
      "seed_attempts", "train", "ig_steps", "alpha", "truth_method", "enumeration_budget", "out"};
  require(j.is_object(), "run config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    require(kKeys.count(k) == 1, "unknown run config key '" + k + "'");
  }
  RunConfig c;
  try {
    if (j.contains("format")) {
      require(j.at("format").get<std::string>() == kRunConfigFormat, "unknown run config format");
    }
    c.name = j.value("name", c.name);
    c.presets = j.value("presets", c.presets);
    if (j.contains("datasets")) {
      for (const auto& d : j.at("datasets")) c.datasets.push_back(config_from_json(d));
    }
    c.nr_baseline = j.value("nr_baseline", c.nr_baseline);
    c.methods = j.value("methods", c.methods);
    if (j.contains("external")) {
      for (const auto& e : j.at("external")) {
        ExternalSaliency x;
        x.path = e.at("path").get<std::string>();
        if (e.contains("fold")) x.fold = e.at("fold").get<int>();
        if (e.contains("split_test")) x.split_test = e.at("split_test").get<bool>();
        c.external.push_back(x);
      }
    }
    if (j.contains("mode") && !j.at("mode").is_null()) c.mode = j.at("mode").get<std::string>();
    c.modes = j.value("modes", c.modes);
    c.folds = j.value("folds", c.folds);
    c.split_test = j.value("split_test", c.split_test);
    c.seed = j.value("seed", c.seed);
    c.filter = j.value("filter", c.filter);
    c.thresholds = j.value("thresholds", c.thresholds);
    c.retrain = j.value("retrain", c.retrain);
    c.seed_attempts = j.value("seed_attempts", c.seed_attempts);
    if (j.contains("train")) {
      const auto& t = j.at("train");
      c.train.hidden = t.value("hidden", c.train.hidden);
      c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
      c.train.momentum = t.value("momentum", c.train.momentum);
      c.train.max_epochs = t.value("max_epochs", c.train.max_epochs);
      c.train.loss_tolerance = t.value("loss_tolerance", c.train.loss_tolerance);
    }
    c.ig_steps = j.value("ig_steps", c.ig_steps);
    c.alpha = j.value("alpha", c.alpha);
    c.truth_method = j.value("truth_method", c.truth_method);
    c.enumeration_budget = j.value("enumeration_budget", c.enumeration_budget);
    c.out = j.value("out", c.out);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed run config: ") + e.what());
  }
  return c;
}

inline RunConfig read_run_config(const std::filesystem::path& path) {
  try {
    return run_config_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("run config " + path.string() + " is not valid JSON: " + e.what());
  } catch (const IntegrityError&) {
    throw ValidationError("cannot read run config " + path.string());
  }
}

// Interpretation mode for a method: per-method override, global override,
// the method's preset, else as-is.
inline InterpretationMode resolve_mode(const RunConfig& c, const std::string& method) {
  if (auto it = c.modes.find(method); it != c.modes.end()) {
    return parse_interpretation_mode(it->second);
  }
  if (c.mode) return parse_interpretation_mode(*c.mode);
  return preset_mode(method).value_or(InterpretationMode::kAsIs);
}

// One (dataset, split mode, fold) experiment.
struct RunTask {
  DatasetConfig config;
  bool split_test = true;
  int fold = 0;

  // Directory component: "fold<k>" or "nosplit".
  std::string part() const { return split_test ? "fold" + std::to_string(fold) : "nosplit"; }
  std::string prefix() const { return config.name + "/" + part(); }
};

inline std::vector<RunTask> run_tasks(const RunConfig& c) {
  std::vector<RunTask> out;
  for (const auto& d : c.all_datasets()) {
    for (bool split : c.split_test) {
      const int n = split ? c.folds : 1;
      for (int k = 0; k < n; ++k) out.push_back({d, split, k});
    }
  }
  return out;
}

inline SplitOptions split_options(const RunConfig& c, const RunTask& t) {
  SplitOptions o;
  o.test_fraction = default_test_fraction(t.config);
  o.n_folds = std::max(c.folds, 2);
  o.fold = t.fold;
  o.seed = c.seed;
  o.split_test = t.split_test;
  return o;
}

// Run directory plus its manifest. Every artifact is recorded with its
// content hash and the key of the inputs it was derived from; a stage whose
// key and output hash are unchanged is skipped.
class RunState {
 public:
  explicit RunState(RunConfig config) : config_(std::move(config)) {
    config_.validate();
    dir_ = std::filesystem::path(config_.out) / config_.name;
    const auto path = dir_ / "manifest.json";
    if (std::filesystem::exists(path)) {
      try {
        manifest_ = nlohmann::json::parse(read_file(path));
      } catch (const nlohmann::json::exception& e) {
        throw IntegrityError("manifest " + path.string() + " is corrupt: " + e.what());
      }
      require(manifest_.value("format", "") == kManifestFormat, "unknown manifest format");
    } else {
      manifest_ = {{"format", std::string(kManifestFormat)},
                   {"artifacts", nlohmann::json::object()},
                   {"models", nlohmann::json::object()}};
    }
    manifest_["toolkit_version"] = std::string(kToolkitVersion);
    manifest_["config"] = run_config_to_json(config_);
  }

  const RunConfig& config() const { return config_; }
  const std::filesystem::path& dir() const { return dir_; }
  const nlohmann::json& manifest() const { return manifest_; }
  nlohmann::json& models() { return manifest_["models"]; }

  static std::string key_of(const nlohmann::json& inputs) { return sha256_hex(inputs.dump()); }

  // True iff `rel` was produced from inputs with this key and is intact.
  bool fresh(const std::string& rel, const std::string& key) const {
    const auto& arts = manifest_.at("artifacts");
    if (!arts.contains(rel)) return false;
    const auto& a = arts.at(rel);
    if (a.at("key").get<std::string>() != key) return false;
    const auto path = dir_ / rel;
    return std::filesystem::exists(path) && file_sha256(path) == a.at("hash").get<std::string>();
  }

  void write(const std::string& rel, const std::string& key, const std::string& stage,
             const std::string& bytes) {
    write_file(dir_ / rel, bytes);
    verified_.insert(rel);
    manifest_["artifacts"][rel] = {{"hash", sha256_hex(bytes)}, {"key", key}, {"stage", stage}};
  }

  bool has(const std::string& rel) const { return manifest_.at("artifacts").contains(rel); }

  std::string hash_of(const std::string& rel) const {
    require_recorded(rel);
    return manifest_.at("artifacts").at(rel).at("hash").get<std::string>();
  }

  // Recorded hash of an upstream artifact after checking that the file on
  // disk still matches it. Checked once per artifact per instance.
  std::string verified_hash(const std::string& rel) const {
    if (!verified_.count(rel)) {
      read_verified(rel);
      verified_.insert(rel);
    }
    return hash_of(rel);
  }

  // Contents of an upstream artifact after checking it against the hash
  // recorded when it was written.
  std::string read_verified(const std::string& rel) const {
    require_recorded(rel);
    const auto path = dir_ / rel;
    if (!std::filesystem::exists(path)) throw IntegrityError("missing artifact " + rel);
    std::string bytes = read_file(path);
    const std::string expected = hash_of(rel);
    const std::string actual = sha256_hex(bytes);
    if (actual != expected) {
      throw IntegrityError("artifact " + rel + " has hash " + actual + " but the manifest records " +
                           expected);
    }
    return bytes;
  }

  // Rewrites the manifest only when it changed, so a no-op rerun touches
  // nothing.
  void save() const {
    const auto path = dir_ / "manifest.json";
    const std::string text = manifest_.dump(2) + "\n";
    if (std::filesystem::exists(path) && read_file(path) == text) return;
    write_file(path, text);
  }

 private:
  void require_recorded(const std::string& rel) const {
    if (!manifest_.at("artifacts").contains(rel)) {
      throw IntegrityError("artifact " + rel + " has not been produced; run the upstream stage");
    }
  }

  RunConfig config_;
  std::filesystem::path dir_;
  nlohmann::json manifest_;
  mutable std::set<std::string> verified_;
};

namespace paths {

inline std::string dataset(const std::string& ds) { return "datasets/" + ds + ".jsonl"; }
inline std::string truth(const std::string& ds) { return "truth/" + ds + ".jsonl"; }
inline std::string model(const RunTask& t) { return "models/" + t.prefix() + "/model.json"; }
inline std::string outcome(const RunTask& t) { return "models/" + t.prefix() + "/outcome.json"; }
inline std::string saliency(const RunTask& t, const std::string& m) {
  return "saliency/" + t.prefix() + "/" + m + ".jsonl";
}
inline std::string masked(const RunTask& t, const std::string& m) {
  return "masked/" + t.prefix() + "/" + m + ".tsv";
}
inline std::string metrics(const RunTask& t, const std::string& m) {
  return "metrics/" + t.prefix() + "/" + m + ".json";
}
inline std::string gcr(const RunTask& t, const std::string& m, const std::string& kind) {
  return "gcr/" + t.prefix() + "/" + m + "." + kind + ".jsonl";
}
inline std::string fidelity(const RunTask& t, const std::string& m) {
  return "gcr/" + t.prefix() + "/" + m + ".fidelity.json";
}
inline constexpr std::string_view kReportsJsonl = "metrics/reports.jsonl";
inline constexpr std::string_view kReportsCsv = "metrics/reports.csv";

}  // namespace paths

namespace detail {

inline Dataset load_dataset(const RunState& run, const std::string& ds) {
  return parse_dataset(run.read_verified(paths::dataset(ds)));
}

inline GroundTruth load_truth(const RunState& run, const std::string& ds) {
  return parse_ground_truth(run.read_verified(paths::truth(ds)), run.hash_of(paths::dataset(ds)));
}

inline std::vector<int> predictions(const ProbabilityFn& fn, const Dataset& split) {
  std::vector<int> out;
  out.reserve(split.size());
  for (const auto& s : split.samples) out.push_back(argmax_class(fn(split.inputs(s))));
  return out;
}

// Rows of a tensor restricted to (and ordered like) a split.
inline SaliencyTensor restrict_to(const SaliencyTensor& t, const Dataset& split) {
  std::unordered_map<std::int64_t, std::size_t> index;
  for (std::size_t i = 0; i < t.size(); ++i) index[t.ids[i]] = i;
  SaliencyTensor out = t;
  out.ids.clear();
  out.scores.clear();
  out.split = split.split;
  for (const auto& s : split.samples) {
    auto it = index.find(s.id);
    require(it != index.end(), "no saliency scores for sample " + std::to_string(s.id));
    out.ids.push_back(s.id);
    out.scores.push_back(t.scores[it->second]);
  }
  return out;
}

inline bool covers(const SaliencyTensor& t, const Dataset& split) {
  std::unordered_set<std::int64_t> ids(t.ids.begin(), t.ids.end());
  return std::all_of(split.samples.begin(), split.samples.end(),
                     [&ids](const Sample& s) { return ids.count(s.id) == 1; });
}

inline std::string hex_bits(std::uint64_t bits) {
  char buffer[24];
  std::snprintf(buffer, sizeof(buffer), "%llx", static_cast<unsigned long long>(bits));
  return buffer;
}

}  // namespace detail

// A saliency source for one task: a built-in method or an external file.
struct MethodSource {
  std::string name;
  std::optional<std::string> external_path;
};

inline std::vector<MethodSource> task_methods(const RunConfig& c, const RunTask& t) {
  std::vector<MethodSource> out;
  for (const auto& m : c.methods) out.push_back({canonical_method(m), std::nullopt});
  for (const auto& e : c.external) {
    if (e.fold && *e.fold != t.fold) continue;
    if (e.split_test && *e.split_test != t.split_test) continue;
    nlohmann::json header;
    try {
      std::string text = read_file(e.path);
      header = nlohmann::json::parse(text.substr(0, text.find('\n')));
      if (header.at("dataset").at("name").get<std::string>() != t.config.name) continue;
      out.push_back({header.at("method").get<std::string>(), e.path});
    } catch (const nlohmann::json::exception& ex) {
      throw ValidationError("malformed external saliency header in " + e.path + ": " + ex.what());
    }
  }
  std::set<std::string> names;
  for (const auto& m : out) {
    require(names.insert(m.name).second,
            "method '" + m.name + "' appears twice for " + t.prefix());
  }
  return out;
}

// Loads the saliency tensor of a method for a task, checking it against
// the run's dataset hash.
inline SaliencyTensor load_saliency(const RunState& run, const RunTask& t, const MethodSource& m,
                                    const Dataset& ds) {
  const std::string hash = run.hash_of(paths::dataset(t.config.name));
  if (m.external_path) return read_saliency(*m.external_path, ds, hash);
  return parse_saliency(run.read_verified(paths::saliency(t, m.name)), ds, hash);
}

inline std::string saliency_input_hash(const RunState& run, const RunTask& t, const MethodSource& m) {
  if (m.external_path) return file_sha256(*m.external_path);
  return run.verified_hash(paths::saliency(t, m.name));
}

// Stage: enumerate every configured dataset.
inline void cmd_gen(RunState& run) {
  for (const auto& d : run.config().all_datasets()) {
    const std::string rel = paths::dataset(d.name);
    const auto key = RunState::key_of({{"stage", "gen"},
                                  {"config", config_to_json(d)},
                                  {"budget", run.config().enumeration_budget}});
    if (run.fresh(rel, key)) continue;
    const Dataset ds = enumerate_samples(d, run.config().enumeration_budget);
    run.write(rel, key, "gen", serialize_dataset(ds));
  }
  run.save();
}

// Stage: prime-set ground truth per dataset.
inline void cmd_truth(RunState& run) {
  const auto method = run.config().truth_method == "analytic" ? TruthMethod::kAnalytic
                                                               : TruthMethod::kBruteForce;
  for (const auto& d : run.config().all_datasets()) {
    const std::string rel = paths::truth(d.name);
    const std::string ds_hash = run.verified_hash(paths::dataset(d.name));
    const auto key = RunState::key_of(
        {{"stage", "truth"}, {"dataset", ds_hash}, {"method", run.config().truth_method}});
    if (run.fresh(rel, key)) continue;
    const Dataset ds = detail::load_dataset(run, d.name);
    run.write(rel, key, "truth", serialize_ground_truth(compute_ground_truth(ds, method), ds_hash));
  }
  run.save();
}

inline nlohmann::json train_config_json(const TrainConfig& t) {
  return {{"hidden", t.hidden},
          {"learning_rate", t.learning_rate},
          {"momentum", t.momentum},
          {"max_epochs", t.max_epochs},
          {"loss_tolerance", t.loss_tolerance}};
}

// Stage: train the surrogate per task. Up to seed_attempts seeds are tried;
// the first model reaching 100% test accuracy is kept, otherwise the most
// accurate one, and the failure is recorded.
inline void cmd_train(RunState& run) {
  const RunConfig& c = run.config();
  for (const auto& t : run_tasks(c)) {
    const std::string rel = paths::model(t);
    const std::string orel = paths::outcome(t);
    const auto key = RunState::key_of({{"stage", "train"},
                                  {"dataset", run.verified_hash(paths::dataset(t.config.name))},
                                  {"task", t.prefix()},
                                  {"folds", c.folds},
                                  {"seed", c.seed},
                                  {"attempts", c.seed_attempts},
                                  {"train", train_config_json(c.train)}});
    if (run.fresh(rel, key) && run.fresh(orel, key)) continue;
    const Dataset ds = detail::load_dataset(run, t.config.name);
    const Partition part = split_dataset(ds, split_options(c, t));
    const Dataset balanced = balance_oversample(part.train, rng::derive(c.seed, "balance/" + t.prefix()));
    const FeatureTable test = FeatureTable::from(part.test);
    nlohmann::json attempts = nlohmann::json::array();
    std::optional<MlpModel> best;
    double best_acc = -1.0;
    int chosen = 0;
    for (int a = 0; a < c.seed_attempts; ++a) {
      TrainConfig tc = c.train;
      tc.seed = rng::derive(c.seed, "model/" + t.prefix() + "/" + std::to_string(a));
      MlpModel m = train(tc, balanced, part.val);
      const double acc = 100.0 * accuracy(m, test);
      attempts.push_back({{"seed", tc.seed},
                          {"epochs", m.outcome().epochs_run},
                          {"train_accuracy", 100.0 * m.outcome().train_accuracy},
                          {"val_accuracy", 100.0 * m.outcome().val_accuracy},
                          {"test_accuracy", acc}});
      if (acc > best_acc) {
        best_acc = acc;
        best = std::move(m);
        chosen = a;
      }
      if (acc == 100.0) break;
    }
    const nlohmann::json outcome = {{"attempts", attempts},
                                    {"chosen", chosen},
                                    {"test_accuracy", best_acc},
                                    {"full_accuracy", best_acc == 100.0}};
    run.write(rel, key, "train", serialize_model(*best));
    run.write(orel, key, "train", outcome.dump(2) + "\n");
    run.models()[t.prefix()] = outcome;
  }
  run.save();
}

// Raw scores of a built-in method for every sample of the dataset.
inline SaliencyTensor compute_builtin_saliency(const RunConfig& c, const RunTask& t,
                                               const std::string& method, const Dataset& ds,
                                               const GroundTruth& truth, const MlpModel& model,
                                               const Partition& part) {
  SaliencyTensor out;
  out.method = method;
  out.order = 1;
  out.mode = InterpretationMode::kAsIs;
  out.dataset_name = ds.config.name;
  out.split = SplitTag::kFull;
  out.length = ds.length();
  const ProbabilityFn fn = model.as_function();
  std::optional<ShapleyExplainer> shapley;
  if (method == "Shapley") shapley.emplace(ds, fn);
  std::vector<double> shared;
  if (method == "FeaturePermutation") {
    shared = feature_permutation(fn, FeatureTable::from(part.train),
                                 rng::derive(c.seed, "permutation/" + t.prefix()));
  }
  const std::uint64_t random_seed = rng::derive(c.seed, "random/" + t.prefix());
  for (const auto& s : ds.samples) {
    const auto x = ds.inputs(s);
    const int cls = model.predict_class(x);
    std::vector<double> row;
    if (method == "Shapley") {
      row = shapley->explain(s, cls);
    } else if (method == "Occlusion") {
      row = occlusion(fn, x, cls, 0.0);
    } else if (method == "FeaturePermutation") {
      row = shared;
    } else if (method == "IntegratedGradients") {
      row = integrated_gradients(model, x, cls, c.ig_steps).scores;
    } else if (method == "GradientXInput") {
      row = gradient_x_input(model, x, cls);
    } else if (method == "OracleMin") {
      row = oracle_saliency(truth.at(s.id), ds.length(), OracleVariant::kMin);
    } else if (method == "OracleMax") {
      row = oracle_saliency(truth.at(s.id), ds.length(), OracleVariant::kMax);
    } else if (method == "Random") {
      row = random_saliency(random_seed, s.id, ds.length());
    } else if (method == "Adversarial") {
      row = adversarial_encoder_saliency(ds.layout, s.label);
    } else {
      throw ValidationError("unknown built-in method '" + method + "'");
    }
    out.ids.push_back(s.id);
    out.scores.push_back(std::move(row));
  }
  return out;
}

// Stage: built-in attributions over every sample, interpretation mode
// applied.
inline void cmd_attr(RunState& run) {
  const RunConfig& c = run.config();
  for (const auto& t : run_tasks(c)) {
    std::optional<Dataset> ds;
    std::optional<GroundTruth> truth;
    std::optional<MlpModel> model;
    std::optional<Partition> part;
    for (const auto& m : task_methods(c, t)) {
      if (m.external_path) continue;
      const std::string rel = paths::saliency(t, m.name);
      const InterpretationMode mode = resolve_mode(c, m.name);
      const auto key = RunState::key_of({{"stage", "attr"},
                                    {"method", m.name},
                                    {"mode", std::string(to_string(mode))},
                                    {"dataset", run.verified_hash(paths::dataset(t.config.name))},
                                    {"truth", run.verified_hash(paths::truth(t.config.name))},
                                    {"model", run.verified_hash(paths::model(t))},
                                    {"seed", c.seed},
                                    {"ig_steps", c.ig_steps}});
      if (run.fresh(rel, key)) continue;
      if (!ds) {
        ds = detail::load_dataset(run, t.config.name);
        truth = detail::load_truth(run, t.config.name);
        model = parse_model(run.read_verified(paths::model(t)));
        part = split_dataset(*ds, split_options(c, t));
      }
      SaliencyTensor raw = compute_builtin_saliency(c, t, m.name, *ds, *truth, *model, *part);
      raw.dataset_hash = run.hash_of(paths::dataset(t.config.name));
      run.write(rel, key, "attr", serialize_saliency(apply_interpretation_mode(raw, mode)));
    }
  }
  run.save();
}

// Predictions of the validation model for a masked test split: a surrogate
// retrained on the masked train split, or the exact formula.
inline std::vector<int> retrained_predictions(const RunConfig& c, const RunTask& t,
                                              const std::string& method, const ThresholdRule& rule,
                                              const MaskedDataset& train, const MaskedDataset& val,
                                              const MaskedDataset& test) {
  std::vector<int> out;
  out.reserve(test.size());
  if (c.retrain == "logic") {
    const LogicPredictor logic(t.config);
    for (const auto& s : test.samples) out.push_back(logic.predict_class(s.inputs));
    return out;
  }
  TrainConfig tc = c.train;
  tc.seed = rng::derive(c.seed, "retrain/" + t.prefix() + "/" + method + "/" + rule.name());
  const MlpModel m = retrain_on_masked(tc, train, val);
  for (const auto& s : test.samples) out.push_back(m.predict_class(s.inputs));
  return out;
}

// Masking, retraining and metrics for one (task, method). `model` is the
// explained base model; its predictions are the reference for DCA.
struct EvalResult {
  MetricReport report;
  std::string masked_tsv;
};

inline EvalResult evaluate_method(const RunConfig& c, const RunTask& t, const Dataset& ds,
                                  const GroundTruth& truth, const ProbabilityFn& model,
                                  bool full_accuracy, const SaliencyTensor& tensor) {
  const Partition part = split_dataset(ds, split_options(c, t));
  const SaliencyTensor t1 = tensor.order == 2 ? reduce_2d_to_1d(tensor) : tensor;
  EvalResult out;
  MetricReport& r = out.report;
  r.dataset = ds.config.name;
  r.scenario = scenario_of(ds.config).name();
  r.method = tensor.method;
  r.fold = t.fold;
  r.split_test = t.split_test;
  r.base_full_accuracy = full_accuracy;
  for (int cls = 0; cls < 2; ++cls) {
    const ClassTags tags = class_information_tags(ds.config, cls);
    r.class_info[cls] = (tags.complementary ? 1 : 0) | (tags.redundant ? 2 : 0);
  }

  const Dataset& test = part.test;
  const ClassRates n = nib(test, t1, truth);
  const ClassRates g = gib(test, t1, truth);
  r.nib_full = n.full;
  r.nib_balanced = n.balanced;
  r.nib_class0 = n.per_class[0];
  r.nib_class1 = n.per_class[1];
  r.gib_full = g.full;
  r.gib_balanced = g.balanced;
  r.gib_class0 = g.per_class[0];
  r.gib_class1 = g.per_class[1];
  if (test.size() >= 3) {
    const auto corr = baseline_correlation(detail::restrict_to(t1, test), ds.layout, c.alpha);
    r.corr_avg_significant = corr.avg_significant_abs_r;
    r.corr_pct_significant = corr.pct_significant;
  }

  out.masked_tsv = "rule\tid\tlabel\tkeep\n";
  if (!detail::covers(t1, part.train) || !detail::covers(t1, part.val)) return out;
  const Dataset balanced =
      balance_oversample(part.train, rng::derive(c.seed, "balance/" + t.prefix()));
  const std::vector<int> base = detail::predictions(model, test);
  const std::vector<int> labels = test.labels();

  std::vector<ThresholdRule> rules = {ThresholdRule::baseline_max()};
  for (double f : c.thresholds) rules.push_back(ThresholdRule::average(f));
  for (const auto& rule : rules) {
    const MaskedDataset mtrain = mask_split(balanced, t1, rule);
    const MaskedDataset mval = mask_split(part.val, t1, rule);
    const MaskedDataset mtest = mask_split(test, t1, rule);
    for (const auto& s : mtest.samples) {
      out.masked_tsv += rule.name() + "\t" + std::to_string(s.id) + "\t" +
                        std::to_string(s.label) + "\t" + detail::hex_bits(s.keep.bits()) + "\n";
    }
    const auto preds = retrained_predictions(c, t, tensor.method, rule, mtrain, mval, mtest);
    if (rule.kind == ThresholdKind::kBaselineMax) {
      r.retrain_acc = prediction_accuracy(preds, labels);
      r.logical_acc = logical_accuracy(test, mtest);
      r.statistical_logical_acc = statistical_logical_accuracy(test, mtest);
      if (r.retrain_acc && r.logical_acc) r.logical_acc_diff = *r.retrain_acc - *r.logical_acc;
      if (r.retrain_acc && r.statistical_logical_acc) {
        r.statistical_logical_acc_diff = *r.retrain_acc - *r.statistical_logical_acc;
      }
      r.minimal_dca = minimal_dca(test, truth, mtest, base, preds);
    } else {
      const MetricValue dca = full_dca(mtest, base, preds);
      if (rule.factor == 1.0) r.full_dca_t10 = dca;
      if (rule.factor == 0.8) r.full_dca_t08 = dca;
      if (rule.factor == 0.5) r.full_dca_t05 = dca;
    }
  }
  return out;
}

inline bool model_full_accuracy(const RunState& run, const RunTask& t) {
  const auto outcome = nlohmann::json::parse(run.read_verified(paths::outcome(t)));
  return outcome.at("full_accuracy").get<bool>();
}

// Stage: masking, retraining and per-(task, method) metric reports.
inline void cmd_eval(RunState& run) {
  const RunConfig& c = run.config();
  for (const auto& t : run_tasks(c)) {
    std::optional<Dataset> ds;
    std::optional<GroundTruth> truth;
    std::optional<MlpModel> model;
    bool full_accuracy = false;
    for (const auto& m : task_methods(c, t)) {
      const std::string rel = paths::metrics(t, m.name);
      const std::string mrel = paths::masked(t, m.name);
      const auto key = RunState::key_of({{"stage", "eval"},
                                    {"dataset", run.verified_hash(paths::dataset(t.config.name))},
                                    {"truth", run.verified_hash(paths::truth(t.config.name))},
                                    {"model", run.verified_hash(paths::model(t))},
                                    {"outcome", run.verified_hash(paths::outcome(t))},
                                    {"saliency", saliency_input_hash(run, t, m)},
                                    {"thresholds", c.thresholds},
                                    {"retrain", c.retrain},
                                    {"train", train_config_json(c.train)},
                                    {"seed", c.seed},
                                    {"alpha", c.alpha}});
      if (run.fresh(rel, key) && run.fresh(mrel, key)) continue;
      if (!ds) {
        ds = detail::load_dataset(run, t.config.name);
        truth = detail::load_truth(run, t.config.name);
        model = parse_model(run.read_verified(paths::model(t)));
        full_accuracy = model_full_accuracy(run, t);
      }
      const SaliencyTensor tensor = load_saliency(run, t, m, *ds);
      const EvalResult e =
          evaluate_method(c, t, *ds, *truth, model->as_function(), full_accuracy, tensor);
      run.write(rel, key, "eval", report_to_json(e.report) + "\n");
      run.write(mrel, key, "eval", e.masked_tsv);
    }
  }
  run.save();
}

struct GcrResult {
  std::map<std::string, GcrModel> models;  // gtm, fcam, tgtm, tfcam
  nlohmann::json fidelity;
};

// GTM and FCAM (plain and thresholded) built on the train split against
// the surrogate's predictions; fidelity measured on the test split.
inline GcrResult evaluate_gcr(const RunConfig& c, const RunTask& t, const Dataset& ds,
                              const ProbabilityFn& model, const SaliencyTensor& tensor) {
  const Partition part = split_dataset(ds, split_options(c, t));
  GcrResult out;
  if (!detail::covers(tensor, part.train)) return out;
  const SaliencyTensor s1 =
      detail::restrict_to(tensor.order == 2 ? reduce_2d_to_1d(tensor) : tensor, part.train);
  const SaliencyTensor s2 =
      detail::restrict_to(tensor.order == 1 ? upscale_1d_to_2d(tensor) : tensor, part.train);
  const auto symbols = identity_symbols(part.train);
  const auto reference = detail::predictions(model, part.train);
  std::vector<double> thresholds;
  for (const auto& row : s1.scores) thresholds.push_back(baseline_threshold(row, ds.layout));
  const int v = static_cast<int>(ds.config.domain.size());
  out.models.emplace("gtm", build_gcr(GcrVariant::kGtm, symbols, s1.scores, reference, v));
  out.models.emplace("fcam", build_gcr(GcrVariant::kFcam, symbols, s2.scores, reference, v));
  out.models.emplace("tgtm",
                     build_gcr(GcrVariant::kGtm, symbols, s1.scores, reference, v, thresholds));
  out.models.emplace("tfcam",
                     build_gcr(GcrVariant::kFcam, symbols, s2.scores, reference, v, thresholds));
  const auto test_symbols = identity_symbols(part.test);
  const auto test_reference = detail::predictions(model, part.test);
  out.fidelity = nlohmann::json::object();
  for (const auto& [kind, g] : out.models) {
    const FidelityResult f = gcr_fidelity(g, test_symbols, test_reference);
    out.fidelity[kind] = {{"fidelity", f.fidelity ? nlohmann::json(*f.fidelity) : nlohmann::json()},
                          {"undefined", f.undefined}};
  }
  return out;
}

// Stage: global coherence representations per (task, method).
inline void cmd_gcr(RunState& run) {
  const RunConfig& c = run.config();
  for (const auto& t : run_tasks(c)) {
    std::optional<Dataset> ds;
    std::optional<MlpModel> model;
    for (const auto& m : task_methods(c, t)) {
      const std::string frel = paths::fidelity(t, m.name);
      const auto key = RunState::key_of({{"stage", "gcr"},
                                    {"dataset", run.verified_hash(paths::dataset(t.config.name))},
                                    {"model", run.verified_hash(paths::model(t))},
                                    {"saliency", saliency_input_hash(run, t, m)}});
      bool fresh = run.fresh(frel, key);
      for (const char* kind : {"gtm", "fcam", "tgtm", "tfcam"}) {
        const auto rel = paths::gcr(t, m.name, kind);
        if (run.has(rel)) fresh = fresh && run.fresh(rel, key);
      }
      if (fresh) continue;
      if (!ds) {
        ds = detail::load_dataset(run, t.config.name);
        model = parse_model(run.read_verified(paths::model(t)));
      }
      const SaliencyTensor tensor = load_saliency(run, t, m, *ds);
      const GcrResult g = evaluate_gcr(c, t, *ds, model->as_function(), tensor);
      for (const auto& [kind, gm] : g.models) {
        run.write(paths::gcr(t, m.name, kind), key, "gcr", serialize_gcr(gm));
      }
      run.write(frel, key, "gcr",
                (g.fidelity.is_null() ? nlohmann::json::object() : g.fidelity).dump(2) + "\n");
    }
  }
  run.save();
}

// Metric reports of every (task, method), with GCR fidelities merged in.
inline std::vector<MetricReport> collect_reports(const RunState& run) {
  const RunConfig& c = run.config();
  std::vector<MetricReport> out;
  for (const auto& t : run_tasks(c)) {
    for (const auto& m : task_methods(c, t)) {
      MetricReport r = report_from_json(run.read_verified(paths::metrics(t, m.name)));
      const auto fid = nlohmann::json::parse(run.read_verified(paths::fidelity(t, m.name)));
      auto take = [&fid](const char* kind) -> MetricValue {
        if (!fid.contains(kind) || fid.at(kind).at("fidelity").is_null()) return std::nullopt;
        return fid.at(kind).at("fidelity").get<double>();
      };
      r.gtm_fidelity = take("gtm");
      r.fcam_fidelity = take("fcam");
      r.tgtm_fidelity = take("tgtm");
      r.tfcam_fidelity = take("tfcam");
      out.push_back(std::move(r));
    }
  }
  return out;
}

struct RankOutcome {
  std::vector<std::pair<std::string, Table>> tables;
  std::vector<std::string> warnings;
};

// Ranking tables over the collected reports. With the split100 filter and
// no qualifying run, ranking falls back to all models with a warning.
inline RankOutcome rank_reports(const std::vector<MetricReport>& reports,
                                const std::string& filter_name) {
  RankOutcome out;
  ReportFilter filter;
  filter.split_test_only = filter_name == "split100";
  filter.full_accuracy_only = filter_name == "split100";
  const bool any = std::any_of(reports.begin(), reports.end(),
                               [&filter](const MetricReport& r) { return filter.accepts(r); });
  if (!any) {
    out.warnings.push_back(
        "no split-test run reached 100% test accuracy; ranking over all models");
    filter = ReportFilter{false, false, std::nullopt};
  }
  const Table scores = average_scores(reports, filter);
  const Table ranks = rank_methods(scores);
  out.tables.emplace_back("average_scores", scores);
  out.tables.emplace_back("metric_ranks", ranks);
  out.tables.emplace_back("property_ranks", property_group_ranks(ranks));
  auto scenarios = scenario_rank_table(reports, filter);
  out.tables.emplace_back("scenario_ranks", scenarios.table);
  out.warnings.insert(out.warnings.end(), scenarios.warnings.begin(), scenarios.warnings.end());
  out.tables.emplace_back("class_information", class_information_table(reports, filter));
  return out;
}

// Stage: aggregated reports and ranking tables.
inline void cmd_rank(RunState& run) {
  const RunConfig& c = run.config();
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& t : run_tasks(c)) {
    for (const auto& m : task_methods(c, t)) {
      inputs.push_back(run.verified_hash(paths::metrics(t, m.name)));
      inputs.push_back(run.verified_hash(paths::fidelity(t, m.name)));
    }
  }
  const auto key = RunState::key_of({{"stage", "rank"}, {"inputs", inputs}, {"filter", c.filter}});
  const std::string jrel(paths::kReportsJsonl);
  const std::string crel(paths::kReportsCsv);
  bool fresh = run.fresh(jrel, key) && run.fresh(crel, key) && run.has("tables/warnings.txt") &&
               run.fresh("tables/warnings.txt", key);
  for (const auto& [rel, a] : run.manifest().at("artifacts").items()) {
    if (a.at("stage") == "rank") fresh = fresh && run.fresh(rel, key);
  }
  if (fresh) return;
  const auto reports = collect_reports(run);
  run.write(jrel, key, "rank", reports_to_jsonl(reports));
  run.write(crel, key, "rank", reports_to_csv(reports));
  const RankOutcome ranked = rank_reports(reports, c.filter);
  std::string warnings;
  for (const auto& w : ranked.warnings) warnings += w + "\n";
  run.write("tables/warnings.txt", key, "rank", warnings);
  for (const auto& [name, table] : ranked.tables) {
    run.write("tables/" + name + ".md", key, "rank", table_to_markdown(table));
    run.write("tables/" + name + ".csv", key, "rank", table_to_csv(table));
    run.write("tables/heatmaps/" + name + ".csv", key, "rank", table_to_heatmap(table));
  }
  run.save();
}

inline void cmd_all(RunState& run) {
  cmd_gen(run);
  cmd_truth(run);
  cmd_train(run);
  cmd_attr(run);
  cmd_eval(run);
  cmd_gcr(run);
  cmd_rank(run);
}

}  // namespace andor

#endif  // ANDOR_PIPELINE_HPP
