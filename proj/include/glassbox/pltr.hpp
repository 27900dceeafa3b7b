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

// Penalized logistic tree regression. Binary threshold features come from
// single-split trees (nu) and two-split trees over feature pairs (xi); an
// adaptive-lasso logistic regression is then fitted on the extended vector.

#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "glassbox/common.hpp"
#include "glassbox/dataset.hpp"
#include "glassbox/linear.hpp"

namespace glassbox::pltr {

struct StumpSpec {
  std::size_t feature = 0;
  double threshold = 0.0;
  double reduction = 0.0;  // weighted Gini reduction on train

  // nu = 1 iff x exceeds the threshold
  double indicator(std::span<const double> x) const { return x[feature] > threshold ? 1.0 : 0.0; }
  friend bool operator==(const StumpSpec&, const StumpSpec&) = default;
};

struct PairSplitSpec {
  std::size_t root = 0;
  double root_threshold = 0.0;
  std::size_t second = 0;
  double second_threshold = 0.0;

  // xi = 1 iff x_root is below its threshold and x_second is above
  double indicator(std::span<const double> x) const {
    return x[root] < root_threshold && x[second] > second_threshold ? 1.0 : 0.0;
  }
  friend bool operator==(const PairSplitSpec&, const PairSplitSpec&) = default;
};

namespace internal {

inline double gini(double w_pos, double w_total) {
  if (w_total <= 0) return 0.0;
  const double p = w_pos / w_total;
  return 2.0 * w_total * p * (1.0 - p);
}

struct Split {
  double threshold;
  double reduction;
};

// Best weighted-Gini split of feature j over the given rows, at midpoints of
// adjacent distinct values. Ties keep the lowest threshold.
inline std::optional<Split> best_split(const Dataset& data, std::size_t j, const std::vector<std::size_t>& rows) {
  std::vector<std::size_t> order = rows;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return data.X(a, j) < data.X(b, j); });
  double pos = 0, tot = 0;
  for (auto i : order) {
    tot += data.w[i];
    pos += data.y[i] ? data.w[i] : 0.0;
  }
  const double parent = gini(pos, tot);
  std::optional<Split> best;
  double lpos = 0, ltot = 0;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    const std::size_t i = order[k];
    ltot += data.w[i];
    lpos += data.y[i] ? data.w[i] : 0.0;
    const double lo = data.X(i, j), hi = data.X(order[k + 1], j);
    if (!(lo < hi)) continue;
    const double red = parent - gini(lpos, ltot) - gini(pos - lpos, tot - ltot);
    if (!best || red > best->reduction) {
      const double mid = 0.5 * (lo + hi);
      best = Split{mid > lo ? mid : hi, red};
    }
  }
  return best;
}

inline std::vector<std::size_t> all_rows(const Dataset& data) {
  std::vector<std::size_t> rows(data.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

}  // namespace internal

// Nullopt for a constant feature.
inline std::optional<StumpSpec> fit_stump(const Dataset& data, std::size_t j) {
  if (j >= data.cols()) throw UsageError("fit_stump: feature index out of range");
  const auto s = internal::best_split(data, j, internal::all_rows(data));
  if (!s) return std::nullopt;
  return StumpSpec{j, s->threshold, s->reduction};
}

// Root is the feature with the larger stump reduction (j on ties). Nullopt
// when either feature is constant or the root's lower branch has fewer than
// two distinct values of the second feature.
inline std::optional<PairSplitSpec> fit_pair_split(const Dataset& data, std::size_t j, std::size_t q,
                                                   const std::optional<StumpSpec>& stump_j,
                                                   const std::optional<StumpSpec>& stump_q) {
  if (j == q) throw UsageError("fit_pair_split: features must differ");
  if (!stump_j || !stump_q) return std::nullopt;
  const bool j_root = stump_j->reduction >= stump_q->reduction;
  const StumpSpec& root = j_root ? *stump_j : *stump_q;
  const std::size_t second = j_root ? q : j;
  std::vector<std::size_t> branch;
  for (std::size_t i = 0; i < data.rows(); ++i)
    if (data.X(i, root.feature) < root.threshold) branch.push_back(i);
  const auto s = internal::best_split(data, second, branch);
  if (!s) return std::nullopt;
  return PairSplitSpec{root.feature, root.threshold, second, s->threshold};
}

inline std::optional<PairSplitSpec> fit_pair_split(const Dataset& data, std::size_t j, std::size_t q) {
  return fit_pair_split(data, j, q, fit_stump(data, j), fit_stump(data, q));
}

inline std::string nu_name(const std::string& f) { return "nu(" + f + ")"; }
inline std::string xi_name(const std::string& a, const std::string& b) { return "xi(" + a + "," + b + ")"; }

inline std::vector<double> extended_row(std::span<const double> x, const std::vector<StumpSpec>& stumps,
                                        const std::vector<PairSplitSpec>& pairs, bool include_original) {
  std::vector<double> out;
  out.reserve((include_original ? x.size() : 0) + stumps.size() + pairs.size());
  if (include_original) out.assign(x.begin(), x.end());
  for (const auto& s : stumps) out.push_back(s.indicator(x));
  for (const auto& p : pairs) out.push_back(p.indicator(x));
  return out;
}

// [x | nu columns | xi columns]; same rows, labels and weights.
inline Dataset assemble_extended(const Dataset& data, const std::vector<StumpSpec>& stumps,
                                 const std::vector<PairSplitSpec>& pairs, bool include_original = true) {
  const std::size_t d = data.cols();
  for (const auto& s : stumps)
    if (s.feature >= d) throw UsageError("assemble_extended: stump refers to a missing feature");
  for (const auto& p : pairs)
    if (p.root >= d || p.second >= d || p.root == p.second)
      throw UsageError("assemble_extended: pair refers to a missing feature");
  Dataset out;
  out.y = data.y;
  out.w = data.w;
  if (include_original) out.feature_names = data.feature_names;
  for (const auto& s : stumps) out.feature_names.push_back(nu_name(data.feature_names[s.feature]));
  for (const auto& p : pairs)
    out.feature_names.push_back(xi_name(data.feature_names[p.root], data.feature_names[p.second]));
  out.X = Matrix(data.rows(), out.feature_names.size());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto row = extended_row(data.X.row(i), stumps, pairs, include_original);
    std::copy(row.begin(), row.end(), out.X.row(i).begin());
  }
  return out;
}

struct PltrOptions {
  // Nullopt selects lambda on the validation grid.
  std::optional<double> lambda;
  bool include_original = true;
  bool fit_pairs = true;
  linear::AdaptiveLassoOptions lasso = [] {
    linear::AdaptiveLassoOptions o;
    o.initial.standardize = true;
    return o;
  }();
};

inline constexpr std::size_t kPairWarningFeatures = 40;

struct PltrModel {
  std::vector<StumpSpec> stumps;
  std::vector<PairSplitSpec> pairs;
  linear::LinearModel linear;
  std::vector<std::string> feature_names;
  bool include_original = true;
  double lambda = 0.0;
  std::vector<std::string> notes;  // skipped stumps / pairs

  std::size_t dim() const { return feature_names.size(); }
  std::size_t extended_dim() const { return (include_original ? dim() : 0) + stumps.size() + pairs.size(); }

  double log_odds(std::span<const double> x) const {
    if (x.size() != dim()) throw UsageError("pltr: dimension mismatch");
    return linear.log_odds(extended_row(x, stumps, pairs, include_original));
  }
  double predict_proba(std::span<const double> x) const { return sigmoid(log_odds(x)); }
  std::vector<double> predict_proba(const Matrix& X) const {
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) out[i] = predict_proba(X.row(i));
    return out;
  }
};

// Threshold features for every feature and every unordered pair.
inline void fit_specs(const Dataset& data, bool with_pairs, std::vector<StumpSpec>& stumps,
                      std::vector<PairSplitSpec>& pairs, std::vector<std::string>& notes) {
  const std::size_t d = data.cols();
  std::vector<std::optional<StumpSpec>> all(d);
  parallel_for(d, [&](std::size_t j) { all[j] = fit_stump(data, j); });
  for (std::size_t j = 0; j < d; ++j) {
    if (all[j]) stumps.push_back(*all[j]);
    else notes.push_back("constant feature skipped: " + data.feature_names[j]);
  }
  if (!with_pairs) return;
  if (d > kPairWarningFeatures)
    notes.push_back("pair generation over " + std::to_string(d) + " features is quadratic");
  std::vector<std::pair<std::size_t, std::size_t>> index;
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t q = j + 1; q < d; ++q) index.emplace_back(j, q);
  std::vector<std::optional<PairSplitSpec>> found(index.size());
  parallel_for(index.size(), [&](std::size_t k) {
    found[k] = fit_pair_split(data, index[k].first, index[k].second, all[index[k].first], all[index[k].second]);
  });
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (found[k]) pairs.push_back(*found[k]);
    else
      notes.push_back("pair skipped: " + data.feature_names[index[k].first] + "," +
                      data.feature_names[index[k].second]);
  }
}

inline PltrModel fit_pltr(const Dataset& data, const PltrOptions& opt = {}) {
  require_both_classes(data.y, "fit_pltr");
  PltrModel model;
  model.feature_names = data.feature_names;
  model.include_original = opt.include_original;
  fit_specs(data, opt.fit_pairs, model.stumps, model.pairs, model.notes);
  const Dataset ext = assemble_extended(data, model.stumps, model.pairs, opt.include_original);
  if (opt.lambda) {
    model.lambda = *opt.lambda;
    model.linear = linear::fit_adaptive_lasso(ext, *opt.lambda, opt.lasso);
  } else {
    auto r = linear::fit_adaptive_lasso_auto(ext, opt.lasso);
    model.lambda = r.lambda;
    model.linear = std::move(r.model);
  }
  return model;
}

}  // namespace glassbox::pltr
