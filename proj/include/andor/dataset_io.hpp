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

#ifndef ANDOR_DATASET_IO_HPP
#define ANDOR_DATASET_IO_HPP

#include <filesystem>
#include <sstream>
#include <string>

#include "andor/dataset.hpp"
#include "andor/hash.hpp"
#include "json.hpp"

namespace andor {

inline constexpr std::string_view kDatasetFormat = "andor-dataset/1";

inline nlohmann::json config_to_json(const DatasetConfig& c) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : c.blocks) {
    blocks.push_back({{"gate_type", std::string(to_string(b.gate_type))},
                      {"n_gates", b.n_gates},
                      {"gate_len", b.gate_len}});
  }
  auto decimals = [](const std::vector<Decimal>& values) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& v : values) out.push_back(v.to_string());
    return out;
  };
  return {{"name", c.name},
          {"blocks", blocks},
          {"nr_baseline", c.nr_baseline},
          {"top_level", std::string(to_string(c.top_level))},
          {"domain", decimals(c.domain)},
          {"positives", decimals(c.positives)},
          {"single_gate", c.single_gate},
          {"top_gate_len", c.top_gate_len}};
}

inline DatasetConfig config_from_json(const nlohmann::json& j) {
  try {
    DatasetConfig c;
    c.name = j.at("name").get<std::string>();
    for (const auto& b : j.at("blocks")) {
      c.blocks.push_back({parse_gate_type(b.at("gate_type").get<std::string>()),
                          b.at("n_gates").get<int>(), b.at("gate_len").get<int>()});
    }
    c.nr_baseline = j.at("nr_baseline").get<int>();
    c.top_level = parse_gate_type(j.at("top_level").get<std::string>());
    for (const auto& v : j.at("domain")) c.domain.push_back(Decimal::parse(v.get<std::string>()));
    for (const auto& v : j.at("positives")) {
      c.positives.push_back(Decimal::parse(v.get<std::string>()));
    }
    c.single_gate = j.value("single_gate", false);
    c.top_gate_len = j.value("top_gate_len", 0);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed dataset config: ") + e.what());
  }
}

// Line-delimited JSON: a header object with the full config, then one
// record per sample. Inputs are written as canonical decimal text so the
// encoding is byte-exact.
inline std::string serialize_dataset(const Dataset& ds) {
  std::string out;
  nlohmann::json header = {{"format", std::string(kDatasetFormat)},
                           {"config", config_to_json(ds.config)},
                           {"split", std::string(to_string(ds.split))},
                           {"length", ds.length()},
                           {"count", ds.size()}};
  out += header.dump();
  out += '\n';
  std::vector<std::string> text;
  for (const auto& v : ds.config.domain) text.push_back(v.to_string());
  for (const auto& s : ds.samples) {
    out += "{\"id\":" + std::to_string(s.id) + ",\"inputs\":[";
    for (std::size_t j = 0; j < s.codes.size(); ++j) {
      if (j) out += ',';
      out += text[s.codes[j]];
    }
    out += "],\"label\":" + std::to_string(s.label) + "}\n";
  }
  return out;
}

inline Dataset parse_dataset(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "empty dataset file");
  Dataset ds;
  std::size_t count = 0;
  try {
    auto header = nlohmann::json::parse(line);
    require(header.at("format").get<std::string>() == kDatasetFormat,
            "unknown dataset format '" + header.at("format").get<std::string>() + "'");
    ds.config = config_from_json(header.at("config"));
    ds.layout = build_layout(ds.config);
    ds.split = parse_split_tag(header.at("split").get<std::string>());
    count = header.at("count").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed dataset header: ") + e.what());
  }
  Formula formula(ds.config);
  ds.samples.reserve(count);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      auto rec = nlohmann::json::parse(line);
      Sample s;
      s.id = rec.at("id").get<std::int64_t>();
      std::vector<Decimal> inputs;
      for (const auto& v : rec.at("inputs")) inputs.push_back(Decimal::from_double(v.get<double>()));
      s.codes = encode_inputs(ds.config, inputs);
      s.label = rec.at("label").get<int>();
      require(s.label == formula.eval_codes(s.codes),
              "sample " + std::to_string(s.id) + " label disagrees with the formula");
      ds.samples.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("malformed dataset record: ") + e.what());
    }
  }
  require(ds.samples.size() == count, "dataset record count mismatch");
  return ds;
}

inline std::string dataset_hash(const Dataset& ds) {
  return sha256_hex(serialize_dataset(ds));
}

inline void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
  write_file(path, serialize_dataset(ds));
}

inline Dataset read_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_file(path));
}

}  // namespace andor

#endif  // ANDOR_DATASET_IO_HPP
