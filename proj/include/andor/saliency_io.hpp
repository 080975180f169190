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

#ifndef ANDOR_SALIENCY_IO_HPP
#define ANDOR_SALIENCY_IO_HPP

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <unordered_set>

#include "andor/common.hpp"
#include "andor/dataset.hpp"
#include "andor/hash.hpp"
#include "andor/saliency.hpp"
#include "json.hpp"

namespace andor {

inline constexpr std::string_view kSaliencyFormat = "andor-saliency/1";

// Line-delimited JSON: a header line, then one {"id", "scores"} line per
// sample. Scores use 17 significant digits, so reading is exact.
inline std::string serialize_saliency(const SaliencyTensor& t) {
  t.validate();
  nlohmann::json header = {{"format", std::string(kSaliencyFormat)},
                           {"dataset", {{"name", t.dataset_name}, {"hash", t.dataset_hash}}},
                           {"split", std::string(to_string(t.split))},
                           {"method", t.method},
                           {"order", t.order},
                           {"mode", std::string(to_string(t.mode))},
                           {"mode_applied", !t.raw},
                           {"count", t.size()},
                           {"length", t.length}};
  std::string out = header.dump() + "\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += "{\"id\":" + std::to_string(t.ids[i]) + ",\"scores\":[";
    for (std::size_t k = 0; k < t.scores[i].size(); ++k) {
      if (k) out += ',';
      out += format_double(t.scores[i][k]);
    }
    out += "]}\n";
  }
  return out;
}

// Parses and checks a tensor against the dataset it claims to describe:
// the content hash must match, and every id must name a distinct sample.
inline SaliencyTensor parse_saliency(const std::string& text, const Dataset& dataset,
                                     const std::string& expected_hash) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "empty saliency file");
  SaliencyTensor t;
  std::size_t count = 0;
  try {
    auto header = nlohmann::json::parse(line);
    const auto format = header.at("format").get<std::string>();
    require(format == kSaliencyFormat, "unknown saliency format version '" + format + "'");
    t.dataset_name = header.at("dataset").at("name").get<std::string>();
    t.dataset_hash = header.at("dataset").at("hash").get<std::string>();
    if (t.dataset_hash != expected_hash) {
      throw IntegrityError("saliency file references dataset hash " + t.dataset_hash +
                           " but the dataset hash is " + expected_hash);
    }
    t.split = parse_split_tag(header.at("split").get<std::string>());
    t.method = header.at("method").get<std::string>();
    t.order = header.at("order").get<int>();
    t.mode = parse_interpretation_mode(header.at("mode").get<std::string>());
    t.raw = !header.at("mode_applied").get<bool>();
    count = header.at("count").get<std::size_t>();
    t.length = header.at("length").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed saliency header: ") + e.what());
  }
  require(t.order == 1 || t.order == 2, "saliency order must be 1 or 2");
  require(t.length == dataset.length(), "saliency length " + std::to_string(t.length) +
                                            " != dataset length " +
                                            std::to_string(dataset.length()));
  std::unordered_set<std::int64_t> known;
  for (const auto& s : dataset.samples) known.insert(s.id);
  std::unordered_set<std::int64_t> seen;
  t.ids.reserve(count);
  t.scores.reserve(count);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      auto rec = nlohmann::json::parse(line);
      const auto id = rec.at("id").get<std::int64_t>();
      require(known.count(id) == 1, "saliency sample id " + std::to_string(id) +
                                        " is not in the dataset");
      require(seen.insert(id).second, "duplicate saliency sample id " + std::to_string(id));
      t.ids.push_back(id);
      t.scores.push_back(rec.at("scores").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("malformed saliency record: ") + e.what());
    }
  }
  require(t.size() == count, "saliency record count " + std::to_string(t.size()) +
                                 " != header count " + std::to_string(count));
  t.validate();
  return t;
}

inline void write_saliency(const SaliencyTensor& t, const std::filesystem::path& path) {
  write_file(path, serialize_saliency(t));
}

inline SaliencyTensor read_saliency(const std::filesystem::path& path, const Dataset& dataset,
                                    const std::string& expected_hash) {
  return parse_saliency(read_file(path), dataset, expected_hash);
}

}  // namespace andor

#endif  // ANDOR_SALIENCY_IO_HPP
