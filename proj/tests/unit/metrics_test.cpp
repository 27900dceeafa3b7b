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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "glassbox/metrics.hpp"

namespace gb = glassbox;
namespace m = glassbox::metrics;

namespace {

double brute_auroc(const std::vector<double>& s, const std::vector<int>& y) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        den += 1;
        num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
  return num / den;
}

struct Instance {
  std::vector<double> scores;
  std::vector<int> labels;
};

// Coarse scores so ties are frequent.
Instance random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(2, 500), level(0, 20);
  Instance in;
  const int n = size(rng);
  for (int i = 0; i < n; ++i) {
    in.scores.push_back(level(rng) / 20.0);
    in.labels.push_back(static_cast<int>(rng() % 2));
  }
  in.labels[0] = 0;
  in.labels[1] = 1;
  return in;
}

}  // namespace

TEST(Auroc, SpecExamples) {
  EXPECT_EQ(m::auroc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<int>{0, 0, 1, 1}), 0.75);
  EXPECT_EQ(m::auroc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<int>{0, 0, 1, 1}), 1.0);
  EXPECT_EQ(m::auroc(std::vector<double>{0.3, 0.3, 0.3}, std::vector<int>{0, 1, 1}), 0.5);
}

TEST(Auroc, SingleClassIsError) {
  EXPECT_THROW(m::auroc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), gb::DataError);
}

TEST(Auroc, MatchesBruteForceExactly) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 200; ++t) {
    const auto in = random_instance(rng);
    EXPECT_EQ(m::auroc(in.scores, in.labels), brute_auroc(in.scores, in.labels)) << "instance " << t;
  }
}

TEST(Auroc, InvariantUnderMonotoneTransforms) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto in = random_instance(rng);
    std::vector<double> a, b;
    for (double s : in.scores) {
      a.push_back(std::exp(3 * s));
      b.push_back(2.5 * s - 7);
    }
    const double base = m::auroc(in.scores, in.labels);
    EXPECT_EQ(m::auroc(a, in.labels), base);
    EXPECT_EQ(m::auroc(b, in.labels), base);
  }
}

TEST(Auroc, SwapLabelsAndNegateScores) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    auto in = random_instance(rng);
    const double base = m::auroc(in.scores, in.labels);
    for (auto& s : in.scores) s = -s;
    for (auto& y : in.labels) y = 1 - y;
    EXPECT_NEAR(m::auroc(in.scores, in.labels), base, 1e-15);
  }
}

TEST(Auprc, SpecExamples) {
  EXPECT_EQ(m::auprc(std::vector<double>{0.9, 0.8, 0.1}, std::vector<int>{1, 1, 0}), 1.0);
  EXPECT_NEAR(m::auprc(std::vector<double>{0.9, 0.8, 0.7}, std::vector<int>{1, 0, 1}), 5.0 / 6.0, 1e-15);
  for (int k = 1; k <= 10; ++k) {
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < k; ++i) {
      s.push_back(1.0 - i * 0.01);
      y.push_back(i == k - 1);
    }
    EXPECT_NEAR(m::auprc(s, y), 1.0 / k, 1e-15);
  }
  EXPECT_THROW(m::auprc(std::vector<double>{0.2}, std::vector<int>{0}), gb::DataError);
}

// A tie block contributes one precision value for all its positives.
TEST(Auprc, TieBlockTreatedTogether) {
  const std::vector<double> s{0.5, 0.5, 0.5, 0.5};
  const std::vector<int> y{1, 0, 1, 0};
  EXPECT_EQ(m::auprc(s, y), 0.5);
}

TEST(Classification, SpecExamples) {
  const auto c = m::classification_from_confusion({2, 1, 6, 1});
  EXPECT_NEAR(c.f1, 2.0 / 3.0, 1e-15);
  const auto perfect = m::classification_metrics(std::vector<double>{0.9, 0.1}, std::vector<int>{1, 0});
  EXPECT_EQ(perfect.f1, 1.0);
  EXPECT_EQ(perfect.balanced_accuracy, 1.0);
  const auto neg = m::classification_metrics(std::vector<double>{0.1, 0.2, 0.3}, std::vector<int>{1, 0, 1});
  EXPECT_EQ(neg.f1, 0.0);
  EXPECT_EQ(neg.balanced_accuracy, 0.5);
  EXPECT_TRUE(neg.degenerate);
}

TEST(Classification, ThresholdIsInclusive) {
  const auto c = m::confusion(std::vector<double>{0.5, 0.49}, std::vector<int>{1, 0}, 0.5);
  EXPECT_EQ(c.tp, 1u);
  EXPECT_EQ(c.tn, 1u);
  EXPECT_THROW(m::classification_metrics(std::vector<double>{0.5}, std::vector<int>{1}, 1.0), gb::UsageError);
}

TEST(Classification, MatchesBruteForceConfusion) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> thr(0.05, 0.95);
  for (int t = 0; t < 200; ++t) {
    const auto in = random_instance(rng);
    const double th = thr(rng);
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < in.scores.size(); ++i) {
      const bool p = in.scores[i] >= th;
      if (in.labels[i]) (p ? tp : fn) += 1;
      else (p ? fp : tn) += 1;
    }
    const double prec = tp + fp > 0 ? tp / (tp + fp) : 0, rec = tp / (tp + fn);
    const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0;
    const double ba = 0.5 * (rec + tn / (tn + fp));
    const auto got = m::classification_metrics(in.scores, in.labels, th);
    EXPECT_NEAR(got.f1, f1, 1e-15);
    EXPECT_NEAR(got.balanced_accuracy, ba, 1e-15);
  }
}

TEST(LogLoss, SpecExamples) {
  EXPECT_LE(m::log_loss(std::vector<double>{1.0, 0.0}, std::vector<int>{1, 0}), 1e-11);
  EXPECT_NEAR(m::log_loss(std::vector<double>{0.5, 0.5}, std::vector<int>{1, 0}), std::log(2.0), 1e-15);
  EXPECT_NEAR(m::log_loss(std::vector<double>{0.25}, std::vector<int>{1}), -std::log(0.25), 1e-15);
}

TEST(LogLoss, Weighted) {
  const double l = m::log_loss(std::vector<double>{0.25, 0.5}, std::vector<int>{1, 0}, std::vector<double>{2.0, 0.0});
  EXPECT_NEAR(l, -std::log(0.25), 1e-15);
}

TEST(Curves, EndpointsAndMonotonicity) {
  std::mt19937_64 rng(21);
  const auto in = random_instance(rng);
  const auto roc = m::roc_curve(in.scores, in.labels);
  EXPECT_EQ(roc.front().x, 0.0);
  EXPECT_EQ(roc.back().x, 1.0);
  EXPECT_EQ(roc.back().y, 1.0);
  for (std::size_t k = 1; k < roc.size(); ++k) {
    EXPECT_GE(roc[k].x, roc[k - 1].x);
    EXPECT_GE(roc[k].y, roc[k - 1].y);
  }
  // Trapezoid area of the tie-block ROC equals the Mann-Whitney statistic.
  double area = 0;
  for (std::size_t k = 1; k < roc.size(); ++k) area += (roc[k].x - roc[k - 1].x) * 0.5 * (roc[k].y + roc[k - 1].y);
  EXPECT_NEAR(area, m::auroc(in.scores, in.labels), 1e-12);
  const auto pr = m::pr_curve(in.scores, in.labels);
  EXPECT_EQ(pr.back().x, 1.0);
}

TEST(Evaluate, ReportInUnitInterval) {
  std::mt19937_64 rng(2);
  const auto in = random_instance(rng);
  const auto r = m::evaluate(in.scores, in.labels, 0.5);
  for (double v : {r.auprc, r.auroc, r.f1, r.balanced_accuracy}) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  nlohmann::json j = r;
  const auto back = j.get<m::MetricReport>();
  EXPECT_EQ(back.auprc, r.auprc);
  EXPECT_EQ(back.degenerate, r.degenerate);
}
