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

// Synthetic credit-like data with a documented closed form.
//
//   x_j ~ N(0, 1) independently, j = 0..d-1
//   informative features sit at j = 0, s, 2s, ... with s = d / informative
//   logit p = b + sum_k a_k f_k(x_{i_k}) [+ c sign(x_p) sign(x_q)]
//
// f_k cycles through five monotone shapes, a_k falls linearly from
// strength_max to strength_min, and b is solved by bisection so the mean of p
// equals positive_rate. Redundant copies x_{i_k + 1} = rho x_{i_k} +
// sqrt(1 - rho^2) e overwrite the neighbouring noise feature.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "glassbox/common.hpp"
#include "glassbox/csv.hpp"
#include "glassbox/dataset.hpp"
#include "json.hpp"

namespace glassbox::synth {

struct SynthConfig {
  std::size_t rows = 30000;  // total over both splits
  std::size_t features = 50;
  std::size_t informative = 10;
  bool linear_effects = false;
  double strength_max = 1.0;
  double strength_min = 0.6;
  double positive_rate = 0.2;
  double train_fraction = 0.75;
  // Planted interaction c sign(x_p) sign(x_q); off when strength is 0.
  double xor_strength = 0.0;
  std::size_t xor_first = 0;
  std::size_t xor_second = 5;
  // Copies of the first `redundant` informative features.
  std::size_t redundant = 0;
  double redundant_rho = 0.9;
  std::uint64_t seed = 20150731;
  friend bool operator==(const SynthConfig&, const SynthConfig&) = default;
};

inline void to_json(nlohmann::json& j, const SynthConfig& c) {
  j = nlohmann::json{{"rows", c.rows},
                     {"features", c.features},
                     {"informative", c.informative},
                     {"linear_effects", c.linear_effects},
                     {"strength_max", c.strength_max},
                     {"strength_min", c.strength_min},
                     {"positive_rate", c.positive_rate},
                     {"train_fraction", c.train_fraction},
                     {"xor_strength", c.xor_strength},
                     {"xor_first", c.xor_first},
                     {"xor_second", c.xor_second},
                     {"redundant", c.redundant},
                     {"redundant_rho", c.redundant_rho},
                     {"seed", c.seed}};
}

inline void from_json(const nlohmann::json& j, SynthConfig& c) {
  const SynthConfig d;
  c.rows = j.value("rows", d.rows);
  c.features = j.value("features", d.features);
  c.informative = j.value("informative", d.informative);
  c.linear_effects = j.value("linear_effects", d.linear_effects);
  c.strength_max = j.value("strength_max", d.strength_max);
  c.strength_min = j.value("strength_min", d.strength_min);
  c.positive_rate = j.value("positive_rate", d.positive_rate);
  c.train_fraction = j.value("train_fraction", d.train_fraction);
  c.xor_strength = j.value("xor_strength", d.xor_strength);
  c.xor_first = j.value("xor_first", d.xor_first);
  c.xor_second = j.value("xor_second", d.xor_second);
  c.redundant = j.value("redundant", d.redundant);
  c.redundant_rho = j.value("redundant_rho", d.redundant_rho);
  c.seed = j.value("seed", d.seed);
}

inline void validate(const SynthConfig& c) {
  if (c.features == 0 || c.informative == 0 || c.informative > c.features)
    throw UsageError("synth: need 0 < informative <= features");
  if (c.rows < 4) throw UsageError("synth: too few rows");
  if (!(c.positive_rate > 0 && c.positive_rate < 1)) throw UsageError("synth: positive_rate must lie in (0, 1)");
  if (!(c.train_fraction > 0 && c.train_fraction < 1)) throw UsageError("synth: train_fraction must lie in (0, 1)");
  if (c.xor_strength != 0 && (c.xor_first >= c.features || c.xor_second >= c.features || c.xor_first == c.xor_second))
    throw UsageError("synth: invalid xor pair");
  if (c.redundant > c.informative) throw UsageError("synth: redundant exceeds informative");
  if (c.redundant > 0 && c.features / c.informative < 2)
    throw UsageError("synth: redundant copies need a noise feature after each informative one");
  if (!(std::abs(c.redundant_rho) < 1)) throw UsageError("synth: |rho| must be < 1");
}

inline std::vector<std::size_t> informative_indices(const SynthConfig& c) {
  std::vector<std::size_t> out;
  const std::size_t step = c.features / c.informative;
  for (std::size_t k = 0; k < c.informative; ++k) out.push_back(k * step);
  return out;
}

// (copy index, source index) per planted redundant feature.
inline std::vector<std::pair<std::size_t, std::size_t>> redundant_pairs(const SynthConfig& c) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const auto inf = informative_indices(c);
  for (std::size_t k = 0; k < c.redundant; ++k) out.emplace_back(inf[k] + 1, inf[k]);
  return out;
}

inline std::string feature_name(std::size_t j) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "x%02zu", j);
  return buf;
}

inline double shape(std::size_t k, double x) {
  switch (k % 5) {
    case 0: return std::tanh(1.5 * x) * 1.3;
    case 1: return x;
    case 2: return std::log1p(std::exp(2.0 * x)) / 2.0;
    case 3: return std::copysign(std::pow(std::abs(x), 1.5), x) / 1.5;
    default: return 2.0 * sigmoid(3.0 * x) - 1.0;
  }
}

struct SynthData {
  Matrix X;
  std::vector<int> y;
  std::vector<double> probability;  // true P(y = 1 | x)
  std::vector<std::int32_t> days;   // issue date, days since epoch
  std::vector<std::string> feature_names;
  std::size_t train_rows = 0;
  SynthConfig config;
};

inline constexpr const char* kCutoff = "2015-07-31";

inline SynthData generate(const SynthConfig& c) {
  validate(c);
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SynthData out;
  out.config = c;
  out.X = Matrix(c.rows, c.features);
  for (std::size_t i = 0; i < c.rows; ++i)
    for (std::size_t j = 0; j < c.features; ++j) out.X(i, j) = normal(rng);
  const double rest = std::sqrt(1.0 - c.redundant_rho * c.redundant_rho);
  for (auto [copy, src] : redundant_pairs(c))
    for (std::size_t i = 0; i < c.rows; ++i) out.X(i, copy) = c.redundant_rho * out.X(i, src) + rest * out.X(i, copy);
  for (std::size_t j = 0; j < c.features; ++j) out.feature_names.push_back(feature_name(j));

  const auto inf = informative_indices(c);
  std::vector<double> eta(c.rows, 0.0);
  for (std::size_t i = 0; i < c.rows; ++i) {
    for (std::size_t k = 0; k < inf.size(); ++k) {
      const double a = inf.size() > 1 ? c.strength_max + (c.strength_min - c.strength_max) * static_cast<double>(k) /
                                                             static_cast<double>(inf.size() - 1)
                                      : c.strength_max;
      const double x = out.X(i, inf[k]);
      eta[i] += a * (c.linear_effects ? x : shape(k, x));
    }
    if (c.xor_strength != 0) {
      const double s = (out.X(i, c.xor_first) < 0 ? -1.0 : 1.0) * (out.X(i, c.xor_second) < 0 ? -1.0 : 1.0);
      eta[i] += c.xor_strength * s;
    }
  }
  auto mean_p = [&](double b) {
    double s = 0;
    for (double e : eta) s += sigmoid(b + e);
    return s / static_cast<double>(eta.size());
  };
  double lo = -30, hi = 30;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean_p(mid) < c.positive_rate ? lo : hi) = mid;
  }
  const double b = 0.5 * (lo + hi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < c.rows; ++i) {
    out.probability.push_back(sigmoid(b + eta[i]));
    out.y.push_back(unit(rng) < out.probability.back() ? 1 : 0);
  }

  // Train rows span 2012-01-01..2015-07-31, test rows 2015-08-01..2018-12-31.
  using namespace std::chrono;
  const auto day = [](int y, unsigned m, unsigned d) {
    return static_cast<std::int32_t>(sys_days{year{y} / month{m} / d}.time_since_epoch().count());
  };
  const std::int32_t t0 = day(2012, 1, 1), t1 = day(2015, 7, 31), s0 = day(2015, 8, 1), s1 = day(2018, 12, 31);
  out.train_rows = static_cast<std::size_t>(std::llround(c.train_fraction * static_cast<double>(c.rows)));
  out.train_rows = std::clamp<std::size_t>(out.train_rows, 1, c.rows - 1);
  const std::size_t test_rows = c.rows - out.train_rows;
  for (std::size_t i = 0; i < c.rows; ++i) {
    if (i < out.train_rows) {
      out.days.push_back(t0 + static_cast<std::int32_t>((static_cast<std::int64_t>(t1 - t0) * static_cast<std::int64_t>(i)) /
                                                        static_cast<std::int64_t>(out.train_rows)));
    } else {
      const auto k = static_cast<std::int64_t>(i - out.train_rows);
      out.days.push_back(s0 + static_cast<std::int32_t>((static_cast<std::int64_t>(s1 - s0) * k) /
                                                        static_cast<std::int64_t>(test_rows)));
    }
  }
  return out;
}

inline std::string format_day(std::int32_t days) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

// Header + rows in the raw ingest layout: features, issue_d, loan_status.
inline std::vector<csv::Row> to_csv_rows(const SynthData& s, const PrepConfig& prep = {}) {
  std::vector<csv::Row> rows;
  csv::Row header = s.feature_names;
  header.push_back(prep.date_column);
  header.push_back(prep.target_column);
  rows.push_back(std::move(header));
  for (std::size_t i = 0; i < s.X.rows(); ++i) {
    csv::Row r;
    r.reserve(s.X.cols() + 2);
    for (double v : s.X.row(i)) r.push_back(format_double(v));
    r.push_back(format_day(s.days[i]));
    r.push_back(s.y[i] ? prep.positive_label : prep.negative_label);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline PrepConfig prep_config() {
  PrepConfig p;
  p.split_cutoff = kCutoff;
  return p;
}

// Runs the generated table through the standard preparation path.
inline PreparedData prepare_synthetic(const SynthData& s) {
  const PrepConfig prep = prep_config();
  RawTable table = table_from_rows(to_csv_rows(s, prep), prep);
  return prepare(encode_target(std::move(table), prep), prep);
}

inline PreparedData generate_prepared(const SynthConfig& c) { return prepare_synthetic(generate(c)); }

}  // namespace glassbox::synth
