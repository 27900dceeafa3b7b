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

// Shapley attributions for tree ensembles in margin space.
//
// The coalition value f_S(x) is the path-dependent expectation: at a node
// splitting on a feature in S the instance's branch is followed, otherwise the
// children are averaged by cover. shapley_exact enumerates every coalition;
// tree_shap computes the same quantity in polynomial time by tracking, along
// each root-to-leaf path, the weight of every coalition size.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "glassbox/common.hpp"
#include "glassbox/dataset.hpp"
#include "glassbox/gbdt.hpp"
#include "glassbox/ranking.hpp"

namespace glassbox::shap {

struct Attribution {
  double base_value = 0.0;     // f_empty(x), margin units
  std::vector<double> values;  // one per feature

  double total() const {
    double s = base_value;
    for (double v : values) s += v;
    return s;
  }
};

// Membership mask over feature indices.
class SubsetSpec {
 public:
  SubsetSpec() = default;
  explicit SubsetSpec(std::size_t d) : in_(d, 0) {}
  static SubsetSpec all(std::size_t d) {
    SubsetSpec s(d);
    std::fill(s.in_.begin(), s.in_.end(), 1);
    return s;
  }
  static SubsetSpec from_mask(std::size_t d, std::uint32_t mask) {
    SubsetSpec s(d);
    for (std::size_t j = 0; j < d; ++j) s.in_[j] = (mask >> j) & 1u;
    return s;
  }
  void insert(std::size_t j) { in_.at(j) = 1; }
  bool contains(std::size_t j) const { return j < in_.size() && in_[j]; }
  std::size_t dim() const { return in_.size(); }

 private:
  std::vector<std::uint8_t> in_;
};

namespace internal {

inline double tree_expectation(const gbdt::Tree& tree, std::span<const double> x, const SubsetSpec& s,
                               int k) {
  const auto& node = tree.nodes[static_cast<std::size_t>(k)];
  if (node.is_leaf()) return node.value;
  if (s.contains(static_cast<std::size_t>(node.feature))) {
    const int next = x[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left : node.right;
    return tree_expectation(tree, x, s, next);
  }
  const auto& l = tree.nodes[static_cast<std::size_t>(node.left)];
  const auto& r = tree.nodes[static_cast<std::size_t>(node.right)];
  return (l.cover * tree_expectation(tree, x, s, node.left) +
          r.cover * tree_expectation(tree, x, s, node.right)) /
         node.cover;
}

}  // namespace internal

// Per-tree value (without shrinkage or base score).
inline double conditional_expectation(const gbdt::Tree& tree, std::span<const double> x,
                                      const SubsetSpec& s) {
  return internal::tree_expectation(tree, x, s, 0);
}

inline double conditional_expectation(const gbdt::GbdtModel& model, std::span<const double> x,
                                      const SubsetSpec& s) {
  if (x.size() != model.dim()) throw UsageError("shap: dimension mismatch");
  double sum = 0.0;
  for (const auto& t : model.trees) sum += conditional_expectation(t, x, s);
  return model.base_score + model.learning_rate * sum;
}

inline constexpr std::size_t kMaxExactFeatures = 15;

// Brute-force Shapley values over all 2^d coalitions.
inline Attribution shapley_exact(const gbdt::GbdtModel& model, std::span<const double> x) {
  const std::size_t d = model.dim();
  if (d > kMaxExactFeatures) {
    throw UsageError("shapley_exact: " + std::to_string(d) + " features exceeds the enumeration limit of " +
                     std::to_string(kMaxExactFeatures));
  }
  if (x.size() != d) throw UsageError("shap: dimension mismatch");
  const std::uint32_t count = 1u << d;
  std::vector<double> value(count);
  for (std::uint32_t mask = 0; mask < count; ++mask)
    value[mask] = conditional_expectation(model, x, SubsetSpec::from_mask(d, mask));

  // weight[s] = s! (d - s - 1)! / d! = 1 / (d * C(d-1, s))
  std::vector<double> weight(d, 0.0);
  for (std::size_t s = 0; s < d; ++s) {
    double binom = 1.0;
    for (std::size_t k = 1; k <= s; ++k)
      binom = binom * static_cast<double>(d - 1 - s + k) / static_cast<double>(k);
    weight[s] = 1.0 / (static_cast<double>(d) * binom);
  }

  Attribution a;
  a.base_value = value[0];
  a.values.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    const std::uint32_t bit = 1u << j;
    double phi = 0.0;
    for (std::uint32_t mask = 0; mask < count; ++mask) {
      if (mask & bit) continue;
      phi += weight[static_cast<std::size_t>(std::popcount(mask))] * (value[mask | bit] - value[mask]);
    }
    a.values[j] = phi;
  }
  return a;
}

namespace internal {

struct PathElement {
  int feature = -1;
  double zero_fraction = 0;
  double one_fraction = 0;
  double weight = 0;
};

inline void extend_path(PathElement* path, unsigned depth, double zero_fraction, double one_fraction,
                        int feature) {
  path[depth] = {feature, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0};
  for (int i = static_cast<int>(depth) - 1; i >= 0; --i) {
    path[i + 1].weight += one_fraction * path[i].weight * (i + 1) / static_cast<double>(depth + 1);
    path[i].weight = zero_fraction * path[i].weight * (depth - i) / static_cast<double>(depth + 1);
  }
}

inline void unwind_path(PathElement* path, unsigned depth, unsigned index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  double next = path[depth].weight;
  for (int i = static_cast<int>(depth) - 1; i >= 0; --i) {
    if (one != 0) {
      const double tmp = path[i].weight;
      path[i].weight = next * (depth + 1) / static_cast<double>((i + 1) * one);
      next = tmp - path[i].weight * zero * (depth - i) / static_cast<double>(depth + 1);
    } else {
      path[i].weight = path[i].weight * (depth + 1) / (zero * (depth - i));
    }
  }
  for (unsigned i = index; i < depth; ++i) {
    path[i].feature = path[i + 1].feature;
    path[i].zero_fraction = path[i + 1].zero_fraction;
    path[i].one_fraction = path[i + 1].one_fraction;
  }
}

// Total weight of the path with element `index` removed.
inline double unwound_sum(const PathElement* path, unsigned depth, unsigned index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  double next = path[depth].weight;
  double total = 0;
  if (one != 0) {
    for (int i = static_cast<int>(depth) - 1; i >= 0; --i) {
      const double tmp = next / static_cast<double>((i + 1) * one);
      total += tmp;
      next = path[i].weight - tmp * zero * (depth - i);
    }
  } else {
    for (int i = static_cast<int>(depth) - 1; i >= 0; --i) total += path[i].weight / (zero * (depth - i));
  }
  return total * (depth + 1);
}

inline void recurse(const gbdt::Tree& tree, std::span<const double> x, double scale, double* phi,
                    int k, unsigned depth, PathElement* parent_path, double zero_fraction,
                    double one_fraction, int feature) {
  PathElement* path = parent_path + depth + 1;
  std::copy(parent_path, parent_path + depth + 1, path);
  extend_path(path, depth, zero_fraction, one_fraction, feature);
  const auto& node = tree.nodes[static_cast<std::size_t>(k)];
  if (node.is_leaf()) {
    for (unsigned i = 1; i <= depth; ++i) {
      const double w = unwound_sum(path, depth, i);
      const auto& el = path[i];
      phi[el.feature] += w * (el.one_fraction - el.zero_fraction) * node.value * scale;
    }
    return;
  }
  const bool go_left = x[static_cast<std::size_t>(node.feature)] < node.threshold;
  const int hot = go_left ? node.left : node.right;
  const int cold = go_left ? node.right : node.left;
  const double hot_zero = tree.nodes[static_cast<std::size_t>(hot)].cover / node.cover;
  const double cold_zero = tree.nodes[static_cast<std::size_t>(cold)].cover / node.cover;
  double incoming_zero = 1, incoming_one = 1;
  unsigned index = 0;
  for (; index <= depth; ++index)
    if (path[index].feature == node.feature) break;
  if (index != depth + 1) {
    incoming_zero = path[index].zero_fraction;
    incoming_one = path[index].one_fraction;
    unwind_path(path, depth, index);
    depth -= 1;
  }
  recurse(tree, x, scale, phi, hot, depth + 1, path, hot_zero * incoming_zero, incoming_one, node.feature);
  recurse(tree, x, scale, phi, cold, depth + 1, path, cold_zero * incoming_zero, 0, node.feature);
}

}  // namespace internal

// Adds the tree's attributions, scaled by `scale`, into phi.
inline void tree_shap(const gbdt::Tree& tree, std::span<const double> x, double scale,
                      std::span<double> phi) {
  const int depth = tree.max_depth();
  std::vector<internal::PathElement> storage(static_cast<std::size_t>((depth + 2) * (depth + 3) / 2));
  internal::recurse(tree, x, scale, phi.data(), 0, 0, storage.data(), 1, 1, -1);
}

inline Attribution tree_shap(const gbdt::GbdtModel& model, std::span<const double> x) {
  if (x.size() != model.dim()) throw UsageError("shap: dimension mismatch");
  Attribution a;
  a.values.assign(model.dim(), 0.0);
  double base = 0.0;
  const SubsetSpec none(model.dim());
  for (const auto& t : model.trees) {
    tree_shap(t, x, model.learning_rate, a.values);
    base += conditional_expectation(t, x, none);
  }
  a.base_value = model.base_score + model.learning_rate * base;
  return a;
}

inline constexpr std::size_t kDefaultImportanceRows = 50000;

// Rows used for global importance: all rows, or a deterministic stride when
// the sample exceeds max_rows.
inline std::vector<std::size_t> importance_rows(std::size_t n, std::size_t max_rows) {
  std::vector<std::size_t> rows;
  const std::size_t stride = n > max_rows ? (n + max_rows - 1) / max_rows : 1;
  for (std::size_t i = 0; i < n; i += stride) rows.push_back(i);
  return rows;
}

// Mean |phi_j| over the sample, ranked descending with index tie-break.
inline RankedFeatures global_importance(const gbdt::GbdtModel& model, const Dataset& sample,
                                        std::size_t max_rows = kDefaultImportanceRows) {
  if (sample.rows() == 0) throw DataError("global_importance: empty sample");
  if (sample.cols() != model.dim()) throw UsageError("global_importance: dimension mismatch");
  const auto rows = importance_rows(sample.rows(), max_rows);
  const std::size_t d = model.dim();
  std::vector<double> per_row(rows.size() * d);
  parallel_for(rows.size(), [&](std::size_t r) {
    auto a = tree_shap(model, sample.X.row(rows[r]));
    for (std::size_t j = 0; j < d; ++j) per_row[r * d + j] = std::abs(a.values[j]);
  });
  std::vector<double> mean(d, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t j = 0; j < d; ++j) mean[j] += per_row[r * d + j];
  for (auto& m : mean) m /= static_cast<double>(rows.size());
  return rank_by_score(model.feature_names, mean, "shap", "gbdt");
}

}  // namespace glassbox::shap
