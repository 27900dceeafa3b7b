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

#include "fixtures.hpp"
#include "glassbox/linear.hpp"
#include "glassbox/metrics.hpp"
#include "glassbox/pltr.hpp"

namespace gb = glassbox;
namespace pltr = glassbox::pltr;

namespace {

// Integer features 0..9; positives concentrate where (x0 < 2 and x1 > 5).
gb::Dataset planted_rule(std::size_t n, std::uint64_t seed, std::size_t noise = 2) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> digit(0, 9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> r(2 + noise);
    for (auto& v : r) v = digit(rng);
    const bool rule = r[0] < 2 && r[1] > 5;
    y.push_back(unit(rng) < (rule ? 0.9 : 0.1) ? 1 : 0);
    rows.push_back(std::move(r));
  }
  return gb::testing::make_dataset(rows, y);
}

bool is_binary(double v) { return v == 0.0 || v == 1.0; }

}  // namespace

TEST(Stump, PerfectSeparatorAtMidpoint) {
  const auto d = gb::testing::make_dataset({{1}, {2}, {4}, {5}}, {0, 0, 1, 1});
  const auto s = pltr::fit_stump(d, 0);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->threshold, 3.0);
  EXPECT_GT(s->reduction, 0.0);
}

TEST(Stump, BinaryFeatureSplitsAtHalf) {
  const auto d = gb::testing::make_dataset({{0}, {1}, {0}, {1}, {1}}, {0, 1, 1, 0, 1});
  const auto s = pltr::fit_stump(d, 0);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->threshold, 0.5);
}

TEST(Stump, ConstantFeatureSkipped) {
  const auto d = gb::testing::make_dataset({{2, 0}, {2, 1}, {2, 2}}, {0, 1, 1});
  EXPECT_FALSE(pltr::fit_stump(d, 0));
  EXPECT_THROW(pltr::fit_stump(d, 5), gb::UsageError);
  const auto m = pltr::fit_pltr(d, {.lambda = 0.1});
  EXPECT_EQ(m.stumps.size(), 1u);
  EXPECT_FALSE(m.notes.empty());
}

TEST(Stump, LowestThresholdWinsTies) {
  // Both midpoints separate equally well once weights are symmetric.
  const auto d = gb::testing::make_dataset({{1}, {2}, {3}}, {1, 0, 1});
  const auto s = pltr::fit_stump(d, 0);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->threshold, 1.5);
}

TEST(PairSplit, RecoversPlantedRule) {
  const auto d = planted_rule(8000, 1);
  const auto p = pltr::fit_pair_split(d, 0, 1);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->root, 0u);
  EXPECT_EQ(p->second, 1u);
  EXPECT_LE(std::abs(p->root_threshold - 2.0), 1.0);
  EXPECT_LE(std::abs(p->second_threshold - 5.0), 1.0);
  // Argument order does not change the construction.
  EXPECT_EQ(pltr::fit_pair_split(d, 1, 0), p);
}

TEST(PairSplit, RootFollowsInformativeness) {
  auto gen = [](double a, double b) {
    return gb::testing::simulate(6000, 2, 3, [a, b](auto x) { return a * (x[0] > 0) + b * (x[1] > 0) - 1; });
  };
  const auto first = pltr::fit_pair_split(gen(2.0, 0.7), 0, 1);
  const auto swapped = pltr::fit_pair_split(gen(0.7, 2.0), 0, 1);
  ASSERT_TRUE(first && swapped);
  EXPECT_EQ(first->root, 0u);
  EXPECT_EQ(swapped->root, 1u);
}

TEST(PairSplit, IndicatorIsBinaryAndDegenerateBranchSkipped) {
  const auto d = planted_rule(2000, 2);
  const auto p = pltr::fit_pair_split(d, 0, 2);
  ASSERT_TRUE(p);
  for (std::size_t i = 0; i < d.rows(); ++i) EXPECT_TRUE(is_binary(p->indicator(d.X.row(i))));
  // The second feature is constant inside the root's lower branch.
  const auto c = gb::testing::make_dataset({{0, 7}, {0, 7}, {1, 3}, {1, 4}}, {1, 1, 0, 0});
  EXPECT_FALSE(pltr::fit_pair_split(c, 0, 1));
  EXPECT_THROW(pltr::fit_pair_split(c, 1, 1), gb::UsageError);
}

TEST(Extended, DimensionFormulaAndNames) {
  const auto d = gb::testing::simulate(500, 10, 4, [](auto x) { return x[0]; });
  std::vector<pltr::StumpSpec> stumps;
  std::vector<pltr::PairSplitSpec> pairs;
  std::vector<std::string> notes;
  pltr::fit_specs(d, true, stumps, pairs, notes);
  EXPECT_EQ(stumps.size(), 10u);
  EXPECT_EQ(pairs.size(), 45u);
  const auto ext = pltr::assemble_extended(d, stumps, pairs);
  EXPECT_EQ(ext.cols(), 65u);
  EXPECT_EQ(ext.feature_names[10], "nu(f0)");
  EXPECT_EQ(ext.feature_names[20].rfind("xi(", 0), 0u);
  EXPECT_EQ(pltr::assemble_extended(d, stumps, {}).cols(), 20u);
  EXPECT_EQ(ext.y, d.y);
  EXPECT_EQ(ext.w, d.w);
  for (std::size_t i = 0; i < ext.rows(); ++i)
    for (std::size_t j = 10; j < 65; ++j) ASSERT_TRUE(is_binary(ext.X(i, j)));
}

TEST(Extended, MismatchedSpecRejected) {
  const auto d = gb::testing::make_dataset({{1, 2}, {3, 4}}, {0, 1});
  EXPECT_THROW(pltr::assemble_extended(d, {{5, 0.0, 0.0}}, {}), gb::UsageError);
  EXPECT_THROW(pltr::assemble_extended(d, {}, {{0, 1.0, 0, 1.0}}), gb::UsageError);
}

TEST(FitPltr, BeatsPlainLogisticOnThresholdRule) {
  const auto d = gb::testing::threshold_rules(6000, 5);
  const auto m = pltr::fit_pltr(d);
  const auto lr = gb::linear::fit_logistic(d);
  EXPECT_EQ(m.extended_dim(), 5u + 5u + 10u);
  std::vector<double> lp(d.rows());
  for (std::size_t i = 0; i < d.rows(); ++i) lp[i] = lr.predict_proba(d.X.row(i));
  EXPECT_GT(gb::metrics::auroc(m.predict_proba(d.X), d.y) - gb::metrics::auroc(lp, d.y), 0.03);
}

TEST(FitPltr, HugeLambdaIsInterceptOnly) {
  const auto d = planted_rule(2000, 6);
  const auto m = pltr::fit_pltr(d, {.lambda = 1e6});
  for (double c : m.linear.coefficients) EXPECT_EQ(c, 0.0);
  EXPECT_NEAR(gb::sigmoid(m.linear.intercept), gb::weighted_positive_rate(d.y, d.w), 1e-6);
}

TEST(FitPltr, ZeroLambdaMatchesUnpenalisedExtendedFit) {
  const auto d = planted_rule(3000, 7, 1);
  pltr::PltrOptions opt;
  opt.lambda = 0.0;
  const auto m = pltr::fit_pltr(d, opt);
  const auto ext = pltr::assemble_extended(d, m.stumps, m.pairs);
  const auto ref = gb::linear::fit_logistic(ext, opt.lasso.initial);
  for (std::size_t i = 0; i < d.rows(); i += 7)
    EXPECT_NEAR(m.log_odds(d.X.row(i)), ref.log_odds(ext.X.row(i)), 1e-5);
}

TEST(FitPltr, BinaryOnlyModeIgnoresMonotoneTransforms) {
  const auto d = planted_rule(3000, 8);
  auto t = d;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    t.X(i, 0) = std::exp(t.X(i, 0));
    t.X(i, 1) = t.X(i, 1) * t.X(i, 1) * t.X(i, 1) - 4.0;
    t.X(i, 3) = 2.0 * t.X(i, 3) + 1.0;
  }
  pltr::PltrOptions opt;
  opt.include_original = false;
  const auto a = pltr::fit_pltr(d, opt);
  const auto b = pltr::fit_pltr(t, opt);
  EXPECT_EQ(a.extended_dim(), b.extended_dim());
  for (std::size_t i = 0; i < d.rows(); ++i) EXPECT_NEAR(a.log_odds(d.X.row(i)), b.log_odds(t.X.row(i)), 1e-9);
}

TEST(FitPltr, DeterministicAndRejectsBadInput) {
  const auto d = planted_rule(1500, 9);
  const auto a = pltr::fit_pltr(d), b = pltr::fit_pltr(d);
  EXPECT_EQ(a.stumps, b.stumps);
  EXPECT_EQ(a.pairs, b.pairs);
  EXPECT_EQ(a.linear.coefficients, b.linear.coefficients);
  EXPECT_EQ(a.lambda, b.lambda);
  const std::vector<double> x{1.0};
  EXPECT_THROW(a.predict_proba(x), gb::UsageError);
  const auto one = gb::testing::make_dataset({{1}, {2}}, {1, 1});
  EXPECT_THROW(pltr::fit_pltr(one), gb::DataError);
}
