/*
 * Copyright 2026 The Glassbox Authors.
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

#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_set>
#include <vector>

#include "glassbox/common.hpp"
#include "json.hpp"

namespace glassbox {

// Encoded feature names ordered by non-increasing importance.
struct RankedFeatures {
  std::vector<std::string> names;
  std::vector<double> scores;
  std::string method;        // coef | shap | ebm | gain | cover | frequency | refined
  std::string source_model;  // free-form id of the ranked model

  std::size_t size() const { return names.size(); }

  std::vector<std::string> top(std::size_t k) const {
    k = std::min(k, names.size());
    return {names.begin(), names.begin() + static_cast<std::ptrdiff_t>(k)};
  }

  // Position of `name` in the ranking, or size() when absent.
  std::size_t rank_of(const std::string& name) const {
    return static_cast<std::size_t>(std::find(names.begin(), names.end(), name) - names.begin());
  }

  friend bool operator==(const RankedFeatures&, const RankedFeatures&) = default;
};

// Sorts by descending score; equal scores keep ascending feature index.
inline RankedFeatures rank_by_score(const std::vector<std::string>& names,
                                    const std::vector<double>& scores, std::string method,
                                    std::string source = {}) {
  if (names.size() != scores.size()) throw UsageError("rank_by_score: size mismatch");
  std::vector<std::size_t> order(names.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  RankedFeatures r;
  r.method = std::move(method);
  r.source_model = std::move(source);
  for (auto k : order) {
    r.names.push_back(names[k]);
    r.scores.push_back(scores[k]);
  }
  return r;
}

inline void to_json(nlohmann::json& j, const RankedFeatures& r) {
  nlohmann::json items = nlohmann::json::array();
  for (std::size_t k = 0; k < r.names.size(); ++k)
    items.push_back({{"name", r.names[k]}, {"score", r.scores[k]}});
  j = nlohmann::json{{"method", r.method}, {"source_model", r.source_model}, {"features", items}};
}

inline void from_json(const nlohmann::json& j, RankedFeatures& r) {
  r = RankedFeatures{};
  r.method = j.value("method", std::string{});
  r.source_model = j.value("source_model", std::string{});
  std::unordered_set<std::string> seen;
  double prev = 0;
  for (const auto& item : j.at("features")) {
    auto name = item.at("name").get<std::string>();
    const double score = item.at("score").get<double>();
    if (!seen.insert(name).second) throw DataError("ranking: duplicate feature " + name);
    if (!r.names.empty() && score > prev) throw DataError("ranking: scores must be non-increasing");
    prev = score;
    r.names.push_back(std::move(name));
    r.scores.push_back(score);
  }
}

}  // namespace glassbox
