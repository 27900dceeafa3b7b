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

// Second-order gradient boosted regression trees for binary classification.
// Trees grow level-wise with exact greedy split search over presorted
// feature values.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "glassbox/common.hpp"
#include "glassbox/dataset.hpp"

namespace glassbox::gbdt {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf weight (margin units, before shrinkage)
  double cover = 0.0;  // summed weighted hessian
  double gain = 0.0;   // split gain at build time

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // root at index 0

  int leaf_index(std::span<const double> x) const {
    int k = 0;
    while (!nodes[static_cast<std::size_t>(k)].is_leaf()) {
      const auto& n = nodes[static_cast<std::size_t>(k)];
      k = x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
    }
    return k;
  }

  double predict(std::span<const double> x) const {
    return nodes[static_cast<std::size_t>(leaf_index(x))].value;
  }

  int max_depth() const {
    std::vector<int> depth(nodes.size(), 0);
    int best = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      best = std::max(best, depth[k]);
      if (!nodes[k].is_leaf()) {
        depth[static_cast<std::size_t>(nodes[k].left)] = depth[k] + 1;
        depth[static_cast<std::size_t>(nodes[k].right)] = depth[k] + 1;
      }
    }
    return best;
  }

  friend bool operator==(const Tree&, const Tree&) = default;
};

struct GbdtConfig {
  int rounds = 100;
  double learning_rate = 0.1;
  int max_depth = 4;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_cover = 1.0;
};

inline void validate(const GbdtConfig& c) {
  if (c.rounds < 1) throw UsageError("gbdt: rounds must be >= 1");
  if (!(c.learning_rate > 0 && c.learning_rate <= 1)) throw UsageError("gbdt: learning rate must lie in (0, 1]");
  if (c.max_depth < 1) throw UsageError("gbdt: max_depth must be >= 1");
  if (c.lambda < 0 || c.gamma < 0) throw UsageError("gbdt: lambda and gamma must be >= 0");
  if (c.min_child_cover < 0) throw UsageError("gbdt: min_child_cover must be >= 0");
}

struct GbdtModel {
  std::vector<Tree> trees;
  double base_score = 0.0;
  double learning_rate = 0.1;
  double lambda = 1.0;
  double gamma = 0.0;
  int max_depth = 4;
  double min_child_cover = 1.0;
  std::vector<std::string> feature_names;

  std::size_t dim() const { return feature_names.size(); }

  double predict_margin(std::span<const double> x) const {
    if (x.size() != dim()) throw UsageError("gbdt: dimension mismatch");
    double sum = 0.0;
    for (const auto& t : trees) sum += t.predict(x);
    return base_score + learning_rate * sum;
  }

  double predict_proba(std::span<const double> x) const { return sigmoid(predict_margin(x)); }

  std::vector<double> predict_proba(const Matrix& X) const {
    std::vector<double> out(X.rows());
    parallel_for(X.rows(), [&](std::size_t i) { out[i] = predict_proba(X.row(i)); });
    return out;
  }

  friend bool operator==(const GbdtModel&, const GbdtModel&) = default;
};

// Objective reduction of splitting a node into (L, R), minus the leaf penalty.
inline double split_gain(double g_left, double h_left, double g_right, double h_right, double lambda,
                         double gamma) {
  const double g = g_left + g_right, h = h_left + h_right;
  return 0.5 * (g_left * g_left / (h_left + lambda) + g_right * g_right / (h_right + lambda) -
                g * g / (h + lambda)) -
         gamma;
}

inline double leaf_weight(double g, double h, double lambda) {
  const double den = h + lambda;
  return den > 0 ? -g / den : 0.0;
}

namespace internal {

struct Candidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
  double g_left = 0, h_left = 0;
};

struct NodeStats {
  double g = 0, h = 0;
};

inline double midpoint(double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  return mid > lo ? mid : hi;
}

// Grows one tree on gradient statistics. `sorted[j]` lists row indices in
// ascending order of feature j (ties by row index).
inline Tree grow_tree(const Matrix& X, const std::vector<std::vector<std::uint32_t>>& sorted,
                      const std::vector<double>& grad, const std::vector<double>& hess,
                      const GbdtConfig& cfg, std::vector<int>& node_of) {
  const std::size_t n = X.rows(), d = X.cols();
  Tree tree;
  std::vector<NodeStats> stats;
  NodeStats root;
  for (std::size_t i = 0; i < n; ++i) {
    root.g += grad[i];
    root.h += hess[i];
  }
  tree.nodes.push_back(TreeNode{});
  tree.nodes[0].cover = root.h;
  stats.push_back(root);
  std::fill(node_of.begin(), node_of.end(), 0);

  std::vector<int> frontier{0};
  for (int depth = 0; depth < cfg.max_depth && !frontier.empty(); ++depth) {
    // slot[node] indexes the frontier, -1 for settled nodes.
    std::vector<int> slot(tree.nodes.size(), -1);
    for (std::size_t s = 0; s < frontier.size(); ++s) slot[static_cast<std::size_t>(frontier[s])] = static_cast<int>(s);
    std::vector<Candidate> best(frontier.size());

    struct Scan {
      double g = 0, h = 0, last = 0;
      bool started = false;
    };
    std::vector<Scan> scan(frontier.size());
    for (std::size_t j = 0; j < d; ++j) {
      std::fill(scan.begin(), scan.end(), Scan{});
      for (const auto i : sorted[j]) {
        const int s = slot[static_cast<std::size_t>(node_of[i])];
        if (s < 0) continue;
        auto& sc = scan[static_cast<std::size_t>(s)];
        const double v = X(i, j);
        if (sc.started && v != sc.last) {
          const auto& tot = stats[static_cast<std::size_t>(frontier[static_cast<std::size_t>(s)])];
          const double hr = tot.h - sc.h;
          if (sc.h >= cfg.min_child_cover && hr >= cfg.min_child_cover) {
            const double gain = split_gain(sc.g, sc.h, tot.g - sc.g, hr, cfg.lambda, cfg.gamma);
            auto& b = best[static_cast<std::size_t>(s)];
            if (gain > b.gain) {
              b = {gain, static_cast<int>(j), midpoint(sc.last, v), sc.g, sc.h};
            }
          }
        }
        sc.g += grad[i];
        sc.h += hess[i];
        sc.last = v;
        sc.started = true;
      }
    }

    std::vector<int> next;
    std::vector<int> left_child(tree.nodes.size(), -1);
    for (std::size_t s = 0; s < frontier.size(); ++s) {
      const auto& b = best[s];
      if (b.feature < 0 || !(b.gain > 0)) continue;
      const int k = frontier[s];
      const NodeStats tot = stats[static_cast<std::size_t>(k)];
      const int l = static_cast<int>(tree.nodes.size());
      TreeNode left, right;
      left.cover = b.h_left;
      right.cover = tot.h - b.h_left;
      tree.nodes.push_back(left);
      tree.nodes.push_back(right);
      stats.push_back({b.g_left, b.h_left});
      stats.push_back({tot.g - b.g_left, tot.h - b.h_left});
      auto& node = tree.nodes[static_cast<std::size_t>(k)];
      node.feature = b.feature;
      node.threshold = b.threshold;
      node.left = l;
      node.right = l + 1;
      node.gain = b.gain;
      left_child[static_cast<std::size_t>(k)] = l;
      next.push_back(l);
      next.push_back(l + 1);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int k = node_of[i];
      if (left_child[static_cast<std::size_t>(k)] < 0) continue;
      const auto& node = tree.nodes[static_cast<std::size_t>(k)];
      node_of[i] = X(i, static_cast<std::size_t>(node.feature)) < node.threshold ? node.left : node.right;
    }
    frontier = std::move(next);
  }
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    if (tree.nodes[k].is_leaf()) tree.nodes[k].value = leaf_weight(stats[k].g, stats[k].h, cfg.lambda);
  }
  return tree;
}

}  // namespace internal

// Fits the ensemble. When `loss_trace` is given it receives the weighted
// training log-loss before the first round and after every round.
inline GbdtModel fit_gbdt(const Dataset& data, const GbdtConfig& config,
                          std::vector<double>* loss_trace = nullptr) {
  validate(config);
  require_both_classes(data.y, "fit_gbdt");
  const std::size_t n = data.rows(), d = data.cols();

  GbdtModel model;
  model.learning_rate = config.learning_rate;
  model.lambda = config.lambda;
  model.gamma = config.gamma;
  model.max_depth = config.max_depth;
  model.min_child_cover = config.min_child_cover;
  model.feature_names = data.feature_names;
  model.base_score = logit(weighted_positive_rate(data.y, data.w));

  std::vector<std::vector<std::uint32_t>> sorted(d);
  for (std::size_t j = 0; j < d; ++j) {
    auto& order = sorted[j];
    order.resize(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return data.X(a, j) < data.X(b, j); });
  }

  std::vector<double> margin(n, model.base_score), grad(n), hess(n);
  std::vector<int> node_of(n, 0);
  if (loss_trace) {
    loss_trace->clear();
    loss_trace->push_back(weighted_log_loss(margin, data.y, data.w));
  }
  for (int round = 0; round < config.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto gh = logistic_grad_hess(data.y[i], margin[i]);
      grad[i] = data.w[i] * gh.grad;
      hess[i] = data.w[i] * gh.hess;
    }
    Tree tree = internal::grow_tree(data.X, sorted, grad, hess, config, node_of);
    for (std::size_t i = 0; i < n; ++i)
      margin[i] += config.learning_rate * tree.nodes[static_cast<std::size_t>(node_of[i])].value;
    model.trees.push_back(std::move(tree));
    if (loss_trace) loss_trace->push_back(weighted_log_loss(margin, data.y, data.w));
  }
  return model;
}

enum class ImportanceKind { kGain, kCover, kFrequency };

inline ImportanceKind parse_importance_kind(std::string_view s) {
  if (s == "gain") return ImportanceKind::kGain;
  if (s == "cover") return ImportanceKind::kCover;
  if (s == "frequency") return ImportanceKind::kFrequency;
  throw UsageError("unknown importance kind: " + std::string(s));
}

// Per-feature totals over all internal nodes; unused features score 0.
inline std::vector<double> importance_native(const GbdtModel& model, ImportanceKind kind) {
  std::vector<double> out(model.dim(), 0.0);
  for (const auto& t : model.trees) {
    for (const auto& node : t.nodes) {
      if (node.is_leaf()) continue;
      auto& slot = out[static_cast<std::size_t>(node.feature)];
      switch (kind) {
        case ImportanceKind::kGain: slot += node.gain; break;
        case ImportanceKind::kCover: slot += node.cover; break;
        case ImportanceKind::kFrequency: slot += 1.0; break;
      }
    }
  }
  return out;
}

}  // namespace glassbox::gbdt
