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

// Small builders shared by the unit suites.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "glassbox/dataset.hpp"
#include "glassbox/gbdt.hpp"

namespace glassbox::testing {

inline Dataset make_dataset(const std::vector<std::vector<double>>& rows, const std::vector<int>& y,
                            std::vector<double> w = {}) {
  Dataset d;
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  d.X = Matrix(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) d.X(i, j) = rows[i][j];
  d.y = y;
  d.w = w.empty() ? std::vector<double>(rows.size(), 1.0) : std::move(w);
  for (std::size_t j = 0; j < cols; ++j) d.feature_names.push_back("f" + std::to_string(j));
  return d;
}

// n x d standard normal features; labels drawn from sigmoid(eta(x)).
inline Dataset simulate(std::size_t n, std::size_t d, std::uint64_t seed,
                        const std::function<double(std::span<const double>)>& eta) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dataset out;
  out.X = Matrix(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) out.X(i, j) = normal(rng);
    out.y.push_back(unit(rng) < sigmoid(eta(out.X.row(i))) ? 1 : 0);
  }
  out.w.assign(n, 1.0);
  for (std::size_t j = 0; j < d; ++j) out.feature_names.push_back("f" + std::to_string(j));
  return out;
}

// Sum of threshold rules on uniform(0, 10) features: a pair rule
// (x0 < 2 and x1 > 5) plus a tail step on x2; remaining features are noise.
inline Dataset threshold_rules(std::size_t n, std::uint64_t seed, std::size_t d = 5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 10.0), unit(0.0, 1.0);
  Dataset out;
  out.X = Matrix(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) out.X(i, j) = u(rng);
    const auto x = out.X.row(i);
    const double eta = -2.0 + 3.0 * (x[0] < 2 && x[1] > 5) + 2.0 * (x[2] > 8);
    out.y.push_back(unit(rng) < sigmoid(eta) ? 1 : 0);
  }
  out.w.assign(n, 1.0);
  for (std::size_t j = 0; j < d; ++j) out.feature_names.push_back("f" + std::to_string(j));
  return out;
}

// Random tree of exactly `depth` levels with consistent covers.
inline gbdt::Tree random_tree(std::mt19937_64& rng, std::size_t d, int depth) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> feature(0, d - 1);
  std::uniform_real_distribution<double> share(0.1, 0.9);
  gbdt::Tree t;
  t.nodes.push_back({});
  t.nodes[0].cover = 100.0;
  std::vector<std::pair<int, int>> frontier{{0, 0}};
  for (std::size_t k = 0; k < frontier.size(); ++k) {
    const auto [idx, level] = frontier[k];
    if (level == depth) {
      t.nodes[static_cast<std::size_t>(idx)].value = normal(rng);
      continue;
    }
    const int l = static_cast<int>(t.nodes.size()), r = l + 1;
    const double cover = t.nodes[static_cast<std::size_t>(idx)].cover;
    const double s = share(rng);
    t.nodes.push_back({});
    t.nodes.push_back({});
    auto& n = t.nodes[static_cast<std::size_t>(idx)];
    n.feature = static_cast<int>(feature(rng));
    n.threshold = normal(rng);
    n.left = l;
    n.right = r;
    n.gain = 1.0;
    t.nodes[static_cast<std::size_t>(l)].cover = cover * s;
    t.nodes[static_cast<std::size_t>(r)].cover = cover - cover * s;
    frontier.emplace_back(l, level + 1);
    frontier.emplace_back(r, level + 1);
  }
  return t;
}

inline gbdt::GbdtModel random_model(std::mt19937_64& rng, std::size_t d, std::size_t trees, int max_depth) {
  gbdt::GbdtModel m;
  std::uniform_int_distribution<int> depth(1, max_depth);
  std::normal_distribution<double> normal(0.0, 1.0);
  m.base_score = normal(rng);
  m.learning_rate = 0.3;
  m.max_depth = max_depth;
  for (std::size_t j = 0; j < d; ++j) m.feature_names.push_back("f" + std::to_string(j));
  for (std::size_t k = 0; k < trees; ++k) m.trees.push_back(random_tree(rng, d, depth(rng)));
  return m;
}

inline std::vector<double> random_point(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(d);
  for (auto& v : x) v = normal(rng);
  return x;
}

// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("glassbox_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace glassbox::testing
