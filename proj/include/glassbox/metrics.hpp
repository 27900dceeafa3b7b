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
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "glassbox/common.hpp"
#include "json.hpp"

namespace glassbox::metrics {

namespace internal {

inline void check_sizes(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw UsageError("metrics: scores and labels differ in size");
}

// Indices sorted by decreasing score, ties by index.
inline std::vector<std::size_t> order_desc(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace internal

// Area under the ROC curve via mid-ranks (Mann-Whitney U); ties count half.
inline double auroc(std::span<const double> scores, std::span<const int> labels) {
  internal::check_sizes(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double n_pos = 0, n_neg = 0, rank_sum = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    // Ranks i+1 .. j+1 share the mid-rank; 2x keeps every value integral.
    const double twice_mid = static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum += twice_mid;
        n_pos += 1;
      } else {
        n_neg += 1;
      }
    }
    i = j + 1;
  }
  if (n_pos == 0 || n_neg == 0) throw DataError("auroc: both classes must be present");
  const double u = 0.5 * (rank_sum - n_pos * (n_pos + 1));
  return u / (n_pos * n_neg);
}

// Average precision over score-descending thresholds; each block of tied
// scores is one threshold.
inline double auprc(std::span<const double> scores, std::span<const int> labels) {
  internal::check_sizes(scores, labels);
  const auto order = internal::order_desc(scores);
  double total_pos = 0;
  for (int y : labels) total_pos += y == 1;
  if (total_pos == 0) throw DataError("auprc: no positive examples");
  double tp = 0, fp = 0, ap = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    double block_tp = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] == 1)
        block_tp += 1;
      else
        fp += 1;
      ++j;
    }
    tp += block_tp;
    if (block_tp > 0) ap += (block_tp / total_pos) * (tp / (tp + fp));
    i = j;
  }
  return ap;
}

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

inline Confusion confusion(std::span<const double> scores, std::span<const int> labels,
                           double threshold) {
  internal::check_sizes(scores, labels);
  Confusion c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pred = scores[i] >= threshold;
    if (labels[i] == 1)
      (pred ? c.tp : c.fn)++;
    else
      (pred ? c.fp : c.tn)++;
  }
  return c;
}

struct ClassificationMetrics {
  double f1 = 0;
  double balanced_accuracy = 0;
  double precision = 0;
  double recall = 0;
  // Set when a denominator was zero and the 0 convention applied.
  bool degenerate = false;
};

inline ClassificationMetrics classification_from_confusion(const Confusion& c) {
  ClassificationMetrics m;
  auto ratio = [&m](double num, double den) {
    if (den == 0) {
      m.degenerate = true;
      return 0.0;
    }
    return num / den;
  };
  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  const double tnr = ratio(tn, tn + fp);
  m.f1 = ratio(2 * m.precision * m.recall, m.precision + m.recall);
  m.balanced_accuracy = 0.5 * (m.recall + tnr);
  return m;
}

inline ClassificationMetrics classification_metrics(std::span<const double> scores,
                                                    std::span<const int> labels,
                                                    double threshold = 0.5) {
  if (!(threshold > 0 && threshold < 1)) throw UsageError("threshold must lie in (0, 1)");
  return classification_from_confusion(confusion(scores, labels, threshold));
}

inline constexpr double kLogLossEpsilon = 1e-12;

// Weighted mean negative log-likelihood of probabilities (clipped to
// [eps, 1 - eps]), normalised by the row count.
inline double log_loss(std::span<const double> probs, std::span<const int> labels,
                       std::span<const double> weights = {}) {
  internal::check_sizes(probs, labels);
  if (!weights.empty() && weights.size() != probs.size()) {
    throw UsageError("log_loss: weight vector size mismatch");
  }
  double total = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], kLogLossEpsilon, 1.0 - kLogLossEpsilon);
    const double l = labels[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
    total += (weights.empty() ? 1.0 : weights[i]) * l;
  }
  return probs.empty() ? 0.0 : total / static_cast<double>(probs.size());
}

struct CurvePoint {
  double x;
  double y;
};

// (false positive rate, true positive rate), one point per tie block, from (0,0).
inline std::vector<CurvePoint> roc_curve(std::span<const double> scores, std::span<const int> labels) {
  internal::check_sizes(scores, labels);
  const auto order = internal::order_desc(scores);
  double P = 0, N = 0;
  for (int y : labels) (y == 1 ? P : N) += 1;
  if (P == 0 || N == 0) throw DataError("roc_curve: both classes must be present");
  std::vector<CurvePoint> pts{{0, 0}};
  double tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1 ? tp : fp) += 1;
      ++j;
    }
    pts.push_back({fp / N, tp / P});
    i = j;
  }
  return pts;
}

// (recall, precision), one point per tie block.
inline std::vector<CurvePoint> pr_curve(std::span<const double> scores, std::span<const int> labels) {
  internal::check_sizes(scores, labels);
  const auto order = internal::order_desc(scores);
  double P = 0;
  for (int y : labels) P += y == 1;
  if (P == 0) throw DataError("pr_curve: no positive examples");
  std::vector<CurvePoint> pts;
  double tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1 ? tp : fp) += 1;
      ++j;
    }
    pts.push_back({tp / P, tp / (tp + fp)});
    i = j;
  }
  return pts;
}

struct MetricReport {
  double auprc = 0;
  double auroc = 0;
  double f1 = 0;
  double balanced_accuracy = 0;
  double threshold = 0.5;
  double log_loss = 0;
  bool degenerate = false;
};

inline MetricReport evaluate(std::span<const double> probs, std::span<const int> labels,
                             double threshold = 0.5) {
  MetricReport r;
  r.threshold = threshold;
  r.auprc = auprc(probs, labels);
  r.auroc = auroc(probs, labels);
  const auto cm = classification_metrics(probs, labels, threshold);
  r.f1 = cm.f1;
  r.balanced_accuracy = cm.balanced_accuracy;
  r.degenerate = cm.degenerate;
  r.log_loss = log_loss(probs, labels);
  return r;
}

inline void to_json(nlohmann::json& j, const MetricReport& r) {
  j = nlohmann::json{{"auprc", r.auprc},
                     {"auroc", r.auroc},
                     {"f1", r.f1},
                     {"balanced_accuracy", r.balanced_accuracy},
                     {"threshold", r.threshold},
                     {"log_loss", r.log_loss},
                     {"degenerate", r.degenerate}};
}

inline void from_json(const nlohmann::json& j, MetricReport& r) {
  r.auprc = j.at("auprc").get<double>();
  r.auroc = j.at("auroc").get<double>();
  r.f1 = j.at("f1").get<double>();
  r.balanced_accuracy = j.at("balanced_accuracy").get<double>();
  r.threshold = j.at("threshold").get<double>();
  r.log_loss = j.value("log_loss", 0.0);
  r.degenerate = j.value("degenerate", false);
}

}  // namespace glassbox::metrics
