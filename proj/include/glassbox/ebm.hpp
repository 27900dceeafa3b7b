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

// Explainable boosting: an additive logit model whose terms are per-feature
// binned shape functions (and optional pairwise grids), trained by cyclic
// boosting of tiny trees with a small learning rate.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "glassbox/common.hpp"
#include "glassbox/csv.hpp"
#include "glassbox/dataset.hpp"
#include "glassbox/ranking.hpp"

namespace glassbox::ebm {

// Sorted cut points; bin(x) is the number of cuts <= x.
struct BinDefinition {
  std::vector<double> cuts;

  std::size_t bins() const { return cuts.size() + 1; }
  std::size_t bin(double x) const {
    return static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
  }
  double lower_edge(std::size_t b) const {
    return b == 0 ? -std::numeric_limits<double>::infinity() : cuts[b - 1];
  }
  double upper_edge(std::size_t b) const {
    return b == cuts.size() ? std::numeric_limits<double>::infinity() : cuts[b];
  }
  friend bool operator==(const BinDefinition&, const BinDefinition&) = default;
};

// Quantile cut points (at most max_bins - 1) placed halfway between distinct
// observed values, so every observed value sits strictly inside one bin.
inline BinDefinition make_bins(std::span<const double> values, std::size_t max_bins = 256) {
  if (max_bins < 2) throw UsageError("make_bins: need at least two bins");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> uniq = sorted;
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  auto mid = [](double lo, double hi) {
    const double m = 0.5 * (lo + hi);
    return m > lo ? m : hi;
  };
  BinDefinition def;
  if (uniq.size() <= max_bins) {
    for (std::size_t k = 1; k < uniq.size(); ++k) def.cuts.push_back(mid(uniq[k - 1], uniq[k]));
    return def;
  }
  const std::size_t n = sorted.size();
  for (std::size_t q = 1; q < max_bins; ++q) {
    const double v = sorted[q * n / max_bins];
    auto it = std::lower_bound(uniq.begin(), uniq.end(), v);
    if (it == uniq.begin()) continue;
    const double cut = mid(*(it - 1), v);
    if (def.cuts.empty() || cut > def.cuts.back()) def.cuts.push_back(cut);
  }
  return def;
}

struct ShapeFunction {
  std::size_t feature = 0;
  std::vector<double> scores;               // per bin, margin units
  std::vector<std::uint64_t> train_counts;  // per bin
  friend bool operator==(const ShapeFunction&, const ShapeFunction&) = default;
};

struct PairFunction {
  std::size_t first = 0;   // first < second
  std::size_t second = 0;
  BinDefinition first_bins;
  BinDefinition second_bins;
  std::vector<double> scores;  // row-major, first_bins.bins() x second_bins.bins()
  std::vector<std::uint64_t> train_counts;

  double score(double a, double b) const {
    return scores[first_bins.bin(a) * second_bins.bins() + second_bins.bin(b)];
  }
  friend bool operator==(const PairFunction&, const PairFunction&) = default;
};

struct EbmConfig {
  int rounds = 5000;
  double learning_rate = 0.01;
  int max_leaves = 3;
  int n_pairs = 0;
  std::size_t max_bins = 256;
  std::size_t max_pair_bins = 32;
  // Main-effect boosting holds out every n-th train row (0 disables) and stops
  // once the held-out loss has not improved for `patience` cycles.
  std::size_t validation_interval = 5;
  int patience = 50;
  int pair_rounds = 5000;
  // Pair boosting holds out every n-th train row (0 disables) and stops once
  // the held-out loss has not improved for `pair_patience` cycles, keeping
  // the best grids.
  std::size_t pair_validation_interval = 5;
  int pair_patience = 50;
  std::size_t min_samples_leaf = 2;
  double min_hessian = 1e-4;
  // Stop when a full cycle changes the training loss by less than this.
  double tolerance = 1e-8;
  friend bool operator==(const EbmConfig&, const EbmConfig&) = default;
};

inline void validate(const EbmConfig& c) {
  if (c.rounds < 0 || c.pair_rounds < 0) throw UsageError("ebm: rounds must be >= 0");
  if (!(c.learning_rate > 0 && c.learning_rate <= 1)) throw UsageError("ebm: learning rate must lie in (0, 1]");
  if (c.max_leaves < 2) throw UsageError("ebm: max_leaves must be >= 2");
  if (c.patience < 1 || c.pair_patience < 1) throw UsageError("ebm: patience must be >= 1");
  if (c.n_pairs < 0) throw UsageError("ebm: n_pairs must be >= 0");
  if (c.max_bins < 2 || c.max_bins > 256 || c.max_pair_bins < 2 || c.max_pair_bins > 256)
    throw UsageError("ebm: bin counts must lie in [2, 256]");
}

struct EbmModel {
  double intercept = 0.0;
  std::vector<BinDefinition> bins;
  std::vector<ShapeFunction> shapes;
  std::vector<PairFunction> pairs;
  std::vector<std::string> feature_names;
  EbmConfig config;
  int cycles_run = 0;

  std::size_t dim() const { return feature_names.size(); }

  // Main-effect terms in feature order, then pair terms in pair order.
  std::vector<double> term_contributions(std::span<const double> x) const {
    if (x.size() != dim()) throw UsageError("ebm: dimension mismatch");
    std::vector<double> out;
    out.reserve(shapes.size() + pairs.size());
    for (const auto& s : shapes) out.push_back(s.scores[bins[s.feature].bin(x[s.feature])]);
    for (const auto& p : pairs) out.push_back(p.score(x[p.first], x[p.second]));
    return out;
  }

  double predict_margin(std::span<const double> x) const {
    double m = intercept;
    for (double t : term_contributions(x)) m += t;
    return m;
  }

  double predict_proba(std::span<const double> x) const { return sigmoid(predict_margin(x)); }

  std::vector<double> predict_proba(const Matrix& X) const {
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) out[i] = predict_proba(X.row(i));
    return out;
  }

  std::string term_name(std::size_t t) const {
    if (t < shapes.size()) return feature_names[shapes[t].feature];
    const auto& p = pairs[t - shapes.size()];
    return feature_names[p.first] + " x " + feature_names[p.second];
  }

  friend bool operator==(const EbmModel&, const EbmModel&) = default;
};

namespace internal {

struct Hist {
  double g = 0, h = 0;
  std::uint64_t n = 0;
  Hist& operator+=(const Hist& o) {
    g += o.g;
    h += o.h;
    n += o.n;
    return *this;
  }
  Hist operator-(const Hist& o) const { return {g - o.g, h - o.h, n - o.n}; }
};

inline double node_score(const Hist& s) { return s.h > 0 ? s.g * s.g / s.h : 0.0; }
inline double node_value(const Hist& s) { return s.h > 0 ? -s.g / s.h : 0.0; }

inline bool leaf_ok(const Hist& s, const EbmConfig& c) {
  return s.n >= c.min_samples_leaf && s.h >= c.min_hessian;
}

struct Segment {
  std::size_t lo, hi;  // bins [lo, hi)
  Hist sum;
};

// Greedy best-first partition of ordered bins into at most max_leaves
// contiguous segments. Returns one leaf value per bin, or empty if no split
// improves the objective.
inline std::vector<double> fit_micro_tree(const std::vector<Hist>& hist, const EbmConfig& c) {
  Hist total;
  for (const auto& h : hist) total += h;
  std::vector<Segment> segs{{0, hist.size(), total}};
  for (int leaves = 1; leaves < c.max_leaves; ++leaves) {
    double best_gain = 0.0;
    std::size_t best_seg = 0, best_cut = 0;
    Hist best_left;
    for (std::size_t s = 0; s < segs.size(); ++s) {
      const auto& seg = segs[s];
      Hist left;
      const double parent = node_score(seg.sum);
      for (std::size_t b = seg.lo; b + 1 < seg.hi; ++b) {
        left += hist[b];
        const Hist right = seg.sum - left;
        if (!leaf_ok(left, c) || !leaf_ok(right, c)) continue;
        const double gain = node_score(left) + node_score(right) - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_seg = s;
          best_cut = b + 1;
          best_left = left;
        }
      }
    }
    if (!(best_gain > 0)) break;
    const Segment old = segs[best_seg];
    segs[best_seg] = {old.lo, best_cut, best_left};
    segs.insert(segs.begin() + static_cast<std::ptrdiff_t>(best_seg) + 1,
                Segment{best_cut, old.hi, old.sum - best_left});
  }
  if (segs.size() < 2) return {};
  std::vector<double> values(hist.size(), 0.0);
  for (const auto& seg : segs) {
    const double v = node_value(seg.sum);
    for (std::size_t b = seg.lo; b < seg.hi; ++b) values[b] = v;
  }
  return values;
}

// Rectangle sums over a 2-D histogram through inclusive prefix sums.
class Grid2D {
 public:
  Grid2D(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), cells_(rows * cols) {}
  Hist& at(std::size_t a, std::size_t b) { return cells_[a * cols_ + b]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void build_prefix() {
    prefix_.assign((rows_ + 1) * (cols_ + 1), Hist{});
    for (std::size_t a = 0; a < rows_; ++a)
      for (std::size_t b = 0; b < cols_; ++b) {
        Hist v = cells_[a * cols_ + b];
        v += P(a, b + 1);
        v += P(a + 1, b);
        v = v - P(a, b);
        P(a + 1, b + 1) = v;
      }
  }

  // Sum over rows [a0, a1) and cols [b0, b1).
  Hist rect(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) const {
    Hist v = P(a1, b1);
    v += P(a0, b0);
    return v - P(a0, b1) - P(a1, b0);
  }

 private:
  Hist& P(std::size_t a, std::size_t b) { return prefix_[a * (cols_ + 1) + b]; }
  const Hist& P(std::size_t a, std::size_t b) const { return prefix_[a * (cols_ + 1) + b]; }
  std::size_t rows_, cols_;
  std::vector<Hist> cells_;
  std::vector<Hist> prefix_;
};

struct Rect {
  std::size_t a0, a1, b0, b1;
  Hist sum;
};

struct ChildSplit {
  double score = 0;
  std::vector<Rect> leaves;
};

// Best single split of a rectangle along either axis (or none).
inline ChildSplit best_child(const Grid2D& g, const Rect& r, const EbmConfig& c) {
  ChildSplit best{node_score(r.sum), {r}};
  for (std::size_t a = r.a0 + 1; a < r.a1; ++a) {
    const Hist lo = g.rect(r.a0, a, r.b0, r.b1), hi = r.sum - lo;
    if (!leaf_ok(lo, c) || !leaf_ok(hi, c)) continue;
    const double s = node_score(lo) + node_score(hi);
    if (s > best.score) best = {s, {{r.a0, a, r.b0, r.b1, lo}, {a, r.a1, r.b0, r.b1, hi}}};
  }
  for (std::size_t b = r.b0 + 1; b < r.b1; ++b) {
    const Hist lo = g.rect(r.a0, r.a1, r.b0, b), hi = r.sum - lo;
    if (!leaf_ok(lo, c) || !leaf_ok(hi, c)) continue;
    const double s = node_score(lo) + node_score(hi);
    if (s > best.score) best = {s, {{r.a0, r.a1, r.b0, b, lo}, {r.a0, r.a1, b, r.b1, hi}}};
  }
  return best;
}

struct PairTree {
  double gain = 0;  // objective reduction over the unsplit root
  std::vector<Rect> leaves;
};

// Depth-2 tree over a two-feature histogram: a root split on either axis,
// then the best split of each child.
inline PairTree fit_pair_tree(const Grid2D& g, const EbmConfig& c) {
  const Rect root{0, g.rows(), 0, g.cols(), g.rect(0, g.rows(), 0, g.cols())};
  const double parent = node_score(root.sum);
  PairTree best;
  auto consider = [&](const Rect& l, const Rect& r) {
    if (!leaf_ok(l.sum, c) || !leaf_ok(r.sum, c)) return;
    auto cl = best_child(g, l, c), cr = best_child(g, r, c);
    const double gain = cl.score + cr.score - parent;
    if (gain > best.gain) {
      best.gain = gain;
      best.leaves = std::move(cl.leaves);
      best.leaves.insert(best.leaves.end(), cr.leaves.begin(), cr.leaves.end());
    }
  };
  for (std::size_t a = 1; a < g.rows(); ++a)
    consider({0, a, 0, g.cols(), g.rect(0, a, 0, g.cols())},
             {a, g.rows(), 0, g.cols(), g.rect(a, g.rows(), 0, g.cols())});
  for (std::size_t b = 1; b < g.cols(); ++b)
    consider({0, g.rows(), 0, b, g.rect(0, g.rows(), 0, b)},
             {0, g.rows(), b, g.cols(), g.rect(0, g.rows(), b, g.cols())});
  return best;
}

using BinnedColumn = std::vector<std::uint16_t>;

// Fit-row mask holding out every `every`-th row, or empty when disabled or
// when the held-out rows miss a class.
inline std::vector<std::uint8_t> holdout_mask(std::span<const int> y, std::size_t every) {
  if (every < 2) return {};
  std::vector<std::uint8_t> fit(y.size(), 1);
  std::size_t held = 0, pos = 0;
  for (std::size_t i = every - 1; i < y.size(); i += every) {
    fit[i] = 0;
    ++held;
    pos += y[i] == 1;
  }
  if (held < 2 || pos == 0 || pos == held) return {};
  return fit;
}

inline BinnedColumn bin_column(const Matrix& X, std::size_t j, const BinDefinition& def) {
  BinnedColumn out(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) out[i] = static_cast<std::uint16_t>(def.bin(X(i, j)));
  return out;
}

inline Grid2D pair_histogram(const BinnedColumn& a, std::size_t na, const BinnedColumn& b, std::size_t nb,
                             const std::vector<double>& grad, const std::vector<double>& hess,
                             const std::vector<std::uint8_t>* use = nullptr) {
  Grid2D g(na, nb);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (use && !(*use)[i]) continue;
    auto& cell = g.at(a[i], b[i]);
    cell.g += grad[i];
    cell.h += hess[i];
    cell.n += 1;
  }
  g.build_prefix();
  return g;
}

inline void gradients(const Dataset& data, const std::vector<double>& margin, std::vector<double>& grad,
                      std::vector<double>& hess) {
  for (std::size_t i = 0; i < margin.size(); ++i) {
    const auto gh = logistic_grad_hess(data.y[i], margin[i]);
    grad[i] = data.w[i] * gh.grad;
    hess[i] = data.w[i] * gh.hess;
  }
}

inline std::vector<double> margins(const EbmModel& model, const Matrix& X) {
  std::vector<double> m(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) m[i] = model.predict_margin(X.row(i));
  return m;
}

// Subtracts each term's train mean and adds it to the intercept.
inline void center_pair(EbmModel& model, PairFunction& p, const BinnedColumn& a, const BinnedColumn& b) {
  double sum = 0.0;
  const std::size_t nb = p.second_bins.bins();
  for (std::size_t i = 0; i < a.size(); ++i) sum += p.scores[a[i] * nb + b[i]];
  const double mean = a.empty() ? 0.0 : sum / static_cast<double>(a.size());
  for (auto& s : p.scores) s -= mean;
  model.intercept += mean;
}

}  // namespace internal

// Main-effects fit. `loss_trace` receives the training loss before the first
// cycle and after every cycle.
inline EbmModel fit_main_effects(const Dataset& data, const EbmConfig& config,
                                 std::vector<double>* loss_trace = nullptr) {
  validate(config);
  require_both_classes(data.y, "fit_ebm");
  const std::size_t n = data.rows(), d = data.cols();
  EbmModel model;
  model.config = config;
  model.feature_names = data.feature_names;
  model.intercept = logit(weighted_positive_rate(data.y, data.w));

  std::vector<internal::BinnedColumn> binned(d);
  for (std::size_t j = 0; j < d; ++j) {
    model.bins.push_back(make_bins(data.X.column(j), config.max_bins));
    binned[j] = internal::bin_column(data.X, j, model.bins[j]);
    ShapeFunction s;
    s.feature = j;
    s.scores.assign(model.bins[j].bins(), 0.0);
    s.train_counts.assign(model.bins[j].bins(), 0);
    for (auto b : binned[j]) s.train_counts[b] += 1;
    model.shapes.push_back(std::move(s));
  }

  // Boosting sees only the fit rows; held-out rows get zero weight here and
  // drive early stopping.
  const auto holdout = internal::holdout_mask(data.y, config.validation_interval);
  std::vector<double> wfit(n), wy(n);
  double n_fit = 0, n_val = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool fit = holdout.empty() || holdout[i];
    wfit[i] = fit ? data.w[i] : 0.0;
    wy[i] = data.y[i] ? wfit[i] : 0.0;
    (fit ? n_fit : n_val) += 1;
  }
  std::vector<std::vector<std::uint64_t>> fit_counts(d);
  for (std::size_t j = 0; j < d; ++j) {
    fit_counts[j].assign(model.bins[j].bins(), 0);
    for (std::size_t i = 0; i < n; ++i) fit_counts[j][binned[j][i]] += wfit[i] > 0;
  }

  std::vector<double> margin(n, model.intercept);
  auto losses = [&] {
    double fit = 0, val = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double l = data.w[i] * logistic_loss(data.y[i], margin[i]);
      (wfit[i] > 0 ? fit : val) += l;
    }
    return std::pair{fit / std::max(1.0, n_fit), val / std::max(1.0, n_val)};
  };
  auto [loss, best_val] = losses();
  if (loss_trace) loss_trace->assign(1, loss);
  int best_cycle = 0;
  std::vector<std::vector<double>> best_scores;
  auto snapshot = [&] {
    best_scores.clear();
    for (const auto& f : model.shapes) best_scores.push_back(f.scores);
  };
  if (!holdout.empty()) snapshot();

  // Each feature's margin update is folded into the next pass over the rows.
  // inv[i] tracks exp(-margin[i]) multiplicatively and is refreshed every cycle.
  std::vector<double> inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[i] = std::exp(-margin[i]);
  const internal::BinnedColumn* pending_col = nullptr;
  std::vector<double> pending, pending_inv;
  std::vector<internal::Hist> hist;
  for (int cycle = 0; cycle < config.rounds; ++cycle) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto& col = binned[j];
      hist.assign(model.bins[j].bins(), internal::Hist{});
      if (pending_col) {
        const auto& pc = *pending_col;
        for (std::size_t i = 0; i < n; ++i) {
          margin[i] += pending[pc[i]];
          inv[i] *= pending_inv[pc[i]];
        }
      }
      pending_col = nullptr;
      for (std::size_t i = 0; i < n; ++i) {
        const double p = 1.0 / (1.0 + inv[i]);
        auto& h = hist[col[i]];
        h.g += wfit[i] * p - wy[i];
        h.h += wfit[i] * p * (1.0 - p);
      }
      for (std::size_t b = 0; b < hist.size(); ++b) hist[b].n = fit_counts[j][b];
      const auto values = internal::fit_micro_tree(hist, config);
      if (values.empty()) continue;
      auto& scores = model.shapes[j].scores;
      pending.assign(values.size(), 0.0);
      pending_inv.assign(values.size(), 1.0);
      for (std::size_t b = 0; b < values.size(); ++b) {
        pending[b] = config.learning_rate * values[b];
        pending_inv[b] = std::exp(-pending[b]);
        scores[b] += pending[b];
      }
      pending_col = &col;
    }
    if (pending_col)
      for (std::size_t i = 0; i < n; ++i) margin[i] += pending[(*pending_col)[i]];
    pending_col = nullptr;
    for (std::size_t i = 0; i < n; ++i) inv[i] = std::exp(-margin[i]);
    const auto [next, val] = losses();
    model.cycles_run = cycle + 1;
    if (loss_trace) loss_trace->push_back(next);
    const bool converged = std::abs(loss - next) < config.tolerance;
    loss = next;
    if (!holdout.empty()) {
      if (val < best_val) {
        best_val = val;
        best_cycle = cycle + 1;
        snapshot();
      } else if (cycle + 1 - best_cycle >= config.patience) {
        break;
      }
    }
    if (converged) break;
  }
  if (!holdout.empty()) {
    for (std::size_t j = 0; j < d; ++j) model.shapes[j].scores = best_scores[j];
    model.cycles_run = best_cycle;
    if (loss_trace) loss_trace->resize(static_cast<std::size_t>(best_cycle) + 1);
  }

  for (std::size_t j = 0; j < d; ++j) {
    auto& scores = model.shapes[j].scores;
    double sum = 0.0;
    for (auto b : binned[j]) sum += scores[b];
    const double mean = n ? sum / static_cast<double>(n) : 0.0;
    for (auto& s : scores) s -= mean;
    model.intercept += mean;
  }
  return model;
}

using FeaturePair = std::pair<std::size_t, std::size_t>;

struct PairScore {
  FeaturePair pair;
  double gain;
};

// Scores every pair by the objective reduction of a depth-2 tree fitted on the
// current residuals; returns scores sorted descending ((j, q) tie-break).
inline std::vector<PairScore> score_pairs(const Dataset& data, const EbmModel& model) {
  const std::size_t d = data.cols();
  if (d != model.dim()) throw UsageError("detect_pairs: dimension mismatch");
  const auto margin = internal::margins(model, data.X);
  std::vector<double> grad(data.rows()), hess(data.rows());
  internal::gradients(data, margin, grad, hess);
  std::vector<BinDefinition> defs;
  std::vector<internal::BinnedColumn> binned;
  for (std::size_t j = 0; j < d; ++j) {
    defs.push_back(make_bins(data.X.column(j), model.config.max_pair_bins));
    binned.push_back(internal::bin_column(data.X, j, defs.back()));
  }
  std::vector<PairScore> scores;
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t q = j + 1; q < d; ++q) {
      const auto g = internal::pair_histogram(binned[j], defs[j].bins(), binned[q], defs[q].bins(), grad, hess);
      scores.push_back({{j, q}, internal::fit_pair_tree(g, model.config).gain});
    }
  std::stable_sort(scores.begin(), scores.end(),
                   [](const PairScore& a, const PairScore& b) { return a.gain > b.gain; });
  return scores;
}

inline std::vector<FeaturePair> detect_pairs(const Dataset& data, const EbmModel& model, std::size_t budget) {
  if (budget == 0) return {};
  const auto scores = score_pairs(data, model);
  std::vector<FeaturePair> out;
  for (std::size_t k = 0; k < std::min(budget, scores.size()); ++k) out.push_back(scores[k].pair);
  return out;
}

// Boosts pair grids round-robin on the residuals of the frozen model, then
// centres each grid into the intercept.
inline EbmModel fit_pairs(const Dataset& data, EbmModel model, const std::vector<FeaturePair>& pairs,
                          std::vector<double>* loss_trace = nullptr) {
  if (pairs.empty()) return model;
  const std::size_t n = data.rows(), d = data.cols();
  if (d != model.dim()) throw UsageError("fit_pairs: dimension mismatch");
  std::set<FeaturePair> seen;
  for (const auto& p : model.pairs) seen.insert({p.first, p.second});
  for (auto [a, b] : pairs) {
    if (a == b || a >= d || b >= d) throw UsageError("fit_pairs: invalid pair");
    if (!seen.insert({std::min(a, b), std::max(a, b)}).second) {
      throw UsageError("fit_pairs: duplicate pair (" + std::to_string(a) + ", " + std::to_string(b) + ")");
    }
  }
  const auto& config = model.config;
  std::vector<double> margin = internal::margins(model, data.X);
  const std::size_t first_new = model.pairs.size();
  std::vector<internal::BinnedColumn> ca, cb;
  for (auto [a0, b0] : pairs) {
    PairFunction p;
    p.first = std::min(a0, b0);
    p.second = std::max(a0, b0);
    p.first_bins = make_bins(data.X.column(p.first), config.max_pair_bins);
    p.second_bins = make_bins(data.X.column(p.second), config.max_pair_bins);
    p.scores.assign(p.first_bins.bins() * p.second_bins.bins(), 0.0);
    p.train_counts.assign(p.scores.size(), 0);
    ca.push_back(internal::bin_column(data.X, p.first, p.first_bins));
    cb.push_back(internal::bin_column(data.X, p.second, p.second_bins));
    for (std::size_t i = 0; i < n; ++i) p.train_counts[ca.back()[i] * p.second_bins.bins() + cb.back()[i]] += 1;
    model.pairs.push_back(std::move(p));
  }

  std::vector<std::uint8_t> fit = internal::holdout_mask(data.y, config.pair_validation_interval);
  const bool validate_rows = !fit.empty();
  if (!validate_rows) fit.assign(n, 1);
  auto split_loss = [&](std::uint8_t which) {
    double total = 0, count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (fit[i] != which) continue;
      total += data.w[i] * logistic_loss(data.y[i], margin[i]);
      count += 1;
    }
    return count > 0 ? total / count : 0.0;
  };

  std::vector<double> grad(n), hess(n);
  double loss = split_loss(1);
  double best_val = validate_rows ? split_loss(0) : 0.0;
  int best_cycle = 0;
  std::vector<std::vector<double>> best_scores;
  for (std::size_t k = 0; k < pairs.size(); ++k) best_scores.push_back(model.pairs[first_new + k].scores);
  if (loss_trace) loss_trace->assign(1, loss);
  for (int cycle = 0; cycle < config.pair_rounds; ++cycle) {
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      auto& p = model.pairs[first_new + k];
      internal::gradients(data, margin, grad, hess);
      const auto g =
          internal::pair_histogram(ca[k], p.first_bins.bins(), cb[k], p.second_bins.bins(), grad, hess, &fit);
      const auto tree = internal::fit_pair_tree(g, config);
      if (tree.leaves.empty()) continue;
      const std::size_t nb = p.second_bins.bins();
      std::vector<double> step(p.scores.size(), 0.0);
      for (const auto& leaf : tree.leaves) {
        const double v = config.learning_rate * internal::node_value(leaf.sum);
        for (std::size_t a = leaf.a0; a < leaf.a1; ++a)
          for (std::size_t b = leaf.b0; b < leaf.b1; ++b) step[a * nb + b] = v;
      }
      for (std::size_t c = 0; c < step.size(); ++c) p.scores[c] += step[c];
      for (std::size_t i = 0; i < n; ++i) margin[i] += step[ca[k][i] * nb + cb[k][i]];
    }
    const double next = split_loss(1);
    if (loss_trace) loss_trace->push_back(next);
    const bool converged = std::abs(loss - next) < config.tolerance;
    loss = next;
    if (validate_rows) {
      const double val = split_loss(0);
      if (val < best_val) {
        best_val = val;
        best_cycle = cycle + 1;
        for (std::size_t k = 0; k < pairs.size(); ++k) best_scores[k] = model.pairs[first_new + k].scores;
      } else if (cycle + 1 - best_cycle >= config.pair_patience) {
        break;
      }
    }
    if (converged) break;
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (validate_rows) model.pairs[first_new + k].scores = best_scores[k];
    internal::center_pair(model, model.pairs[first_new + k], ca[k], cb[k]);
  }
  return model;
}

// Main effects, then config.n_pairs detected pairs.
inline EbmModel fit_ebm(const Dataset& data, const EbmConfig& config = {},
                        std::vector<double>* loss_trace = nullptr) {
  EbmModel model = fit_main_effects(data, config, loss_trace);
  if (config.n_pairs > 0) {
    const auto pairs = detect_pairs(data, model, static_cast<std::size_t>(config.n_pairs));
    model = fit_pairs(data, std::move(model), pairs);
  }
  return model;
}

struct EbmImportance {
  RankedFeatures features;  // main effects only
  RankedFeatures pairs;     // ranked separately
};

// Mean absolute term score over the rows of `data`.
inline EbmImportance importance_ebm(const EbmModel& model, const Dataset& data) {
  if (data.cols() != model.dim()) throw UsageError("importance_ebm: dimension mismatch");
  std::vector<double> main(model.shapes.size(), 0.0), pair(model.pairs.size(), 0.0);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto terms = model.term_contributions(data.X.row(i));
    for (std::size_t t = 0; t < main.size(); ++t) main[t] += std::abs(terms[t]);
    for (std::size_t t = 0; t < pair.size(); ++t) pair[t] += std::abs(terms[main.size() + t]);
  }
  const double n = static_cast<double>(std::max<std::size_t>(1, data.rows()));
  for (auto& v : main) v /= n;
  for (auto& v : pair) v /= n;
  std::vector<std::string> main_names, pair_names;
  for (std::size_t t = 0; t < main.size(); ++t) main_names.push_back(model.term_name(t));
  for (std::size_t t = 0; t < pair.size(); ++t) pair_names.push_back(model.term_name(main.size() + t));
  return {rank_by_score(main_names, main, "ebm", "ebm"), rank_by_score(pair_names, pair, "ebm", "ebm")};
}

// ---------------------------------------------------------------------------
// Shape export: lower edge, upper edge, score, train count per bin.

inline std::string format_edge(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return format_double(v);
}

inline double parse_edge(const std::string& s) {
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  double v;
  if (!parse_double(s, v)) throw DataError("shape csv: bad edge '" + s + "'");
  return v;
}

inline std::vector<csv::Row> export_shape(const EbmModel& model, std::size_t feature) {
  if (feature >= model.shapes.size()) throw UsageError("export_shape: unknown feature");
  const auto& s = model.shapes[feature];
  const auto& def = model.bins[s.feature];
  std::vector<csv::Row> rows{{"lower", "upper", "score", "count"}};
  for (std::size_t b = 0; b < def.bins(); ++b)
    rows.push_back({format_edge(def.lower_edge(b)), format_edge(def.upper_edge(b)), format_double(s.scores[b]),
                    std::to_string(s.train_counts[b])});
  return rows;
}

inline std::vector<csv::Row> export_shape(const EbmModel& model, const std::string& name) {
  for (std::size_t t = 0; t < model.shapes.size(); ++t)
    if (model.feature_names[model.shapes[t].feature] == name) return export_shape(model, t);
  throw UsageError("export_shape: unknown feature '" + name + "'");
}

inline std::vector<csv::Row> export_pair(const EbmModel& model, std::size_t first, std::size_t second) {
  for (const auto& p : model.pairs) {
    if (p.first != std::min(first, second) || p.second != std::max(first, second)) continue;
    std::vector<csv::Row> rows{{"first_lower", "first_upper", "second_lower", "second_upper", "score", "count"}};
    const std::size_t nb = p.second_bins.bins();
    for (std::size_t a = 0; a < p.first_bins.bins(); ++a)
      for (std::size_t b = 0; b < nb; ++b)
        rows.push_back({format_edge(p.first_bins.lower_edge(a)), format_edge(p.first_bins.upper_edge(a)),
                        format_edge(p.second_bins.lower_edge(b)), format_edge(p.second_bins.upper_edge(b)),
                        format_double(p.scores[a * nb + b]), std::to_string(p.train_counts[a * nb + b])});
    return rows;
  }
  throw UsageError("export_pair: model has no such pair");
}

struct ImportedShape {
  BinDefinition bins;
  std::vector<double> scores;
  std::vector<std::uint64_t> counts;

  double score(double x) const { return scores[bins.bin(x)]; }
};

inline ImportedShape import_shape(const std::vector<csv::Row>& rows) {
  if (rows.size() < 2 || rows[0].size() != 4) throw DataError("shape csv: expected lower,upper,score,count");
  ImportedShape out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 4) throw DataError("shape csv: ragged row");
    if (r > 1) out.bins.cuts.push_back(parse_edge(rows[r][0]));
    double s, c;
    if (!parse_double(rows[r][2], s) || !parse_double(rows[r][3], c)) throw DataError("shape csv: bad score/count");
    out.scores.push_back(s);
    out.counts.push_back(static_cast<std::uint64_t>(c));
  }
  return out;
}

}  // namespace glassbox::ebm
