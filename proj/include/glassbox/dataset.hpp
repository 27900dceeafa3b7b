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

// Tabular ingestion and preprocessing: typed CSV loading, target encoding,
// fico averaging, one-hot encoding, train-mean imputation, temporal split and
// class weighting.

#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "glassbox/common.hpp"
#include "glassbox/csv.hpp"
#include "json.hpp"

namespace glassbox {

enum class ColumnType { kNumeric, kCategorical, kDate };

inline const char* to_string(ColumnType t) {
  switch (t) {
    case ColumnType::kNumeric: return "numeric";
    case ColumnType::kCategorical: return "categorical";
    case ColumnType::kDate: return "date";
  }
  return "unknown";
}

inline constexpr std::int32_t kMissingDate = std::numeric_limits<std::int32_t>::min();

// One typed column. Only the vector matching `type` is populated.
// Missing markers: NaN (numeric), empty string (categorical), kMissingDate (date).
struct Column {
  std::string name;
  ColumnType type = ColumnType::kNumeric;
  std::vector<double> numeric;
  std::vector<std::string> text;
  std::vector<std::int32_t> days;

  std::size_t size() const {
    switch (type) {
      case ColumnType::kNumeric: return numeric.size();
      case ColumnType::kCategorical: return text.size();
      case ColumnType::kDate: return days.size();
    }
    return 0;
  }
};

class RawTable {
 public:
  RawTable() = default;

  std::size_t rows() const { return columns_.empty() ? 0 : columns_.front().size(); }
  std::size_t cols() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }

  const Column* find(std::string_view name) const {
    for (const auto& c : columns_)
      if (c.name == name) return &c;
    return nullptr;
  }
  Column* find(std::string_view name) {
    for (auto& c : columns_)
      if (c.name == name) return &c;
    return nullptr;
  }

  void add(Column col) {
    if (find(col.name)) throw DataError("duplicate column name: " + col.name);
    if (!columns_.empty() && col.size() != rows()) {
      throw DataError("column length mismatch: " + col.name);
    }
    columns_.push_back(std::move(col));
  }

  void insert(std::size_t pos, Column col) {
    if (find(col.name)) throw DataError("duplicate column name: " + col.name);
    if (!columns_.empty() && col.size() != rows()) {
      throw DataError("column length mismatch: " + col.name);
    }
    columns_.insert(columns_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(col));
  }

  void remove(std::string_view name) {
    std::erase_if(columns_, [&](const Column& c) { return c.name == name; });
  }

  std::size_t index_of(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
      if (columns_[i].name == name) return i;
    throw DataError("missing column: " + std::string(name));
  }

  // Keeps the rows whose mask entry is true, in order.
  void filter_rows(const std::vector<bool>& keep) {
    for (auto& c : columns_) {
      auto apply = [&](auto& vec) {
        std::size_t out = 0;
        for (std::size_t i = 0; i < vec.size(); ++i)
          if (keep[i]) {
            if (out != i) vec[out] = std::move(vec[i]);
            ++out;
          }
        vec.resize(out);
      };
      apply(c.numeric);
      apply(c.text);
      apply(c.days);
    }
  }

 private:
  std::vector<Column> columns_;
};

struct PrepConfig {
  std::string target_column = "loan_status";
  std::string positive_label = "Charged Off";
  std::string negative_label = "Fully Paid";
  std::string date_column = "issue_d";
  std::string split_cutoff = "2015-07-31";
  std::vector<std::string> categorical_columns;
  // Manual include/exclude lists over raw columns (expert input).
  std::vector<std::string> include_columns;
  std::vector<std::string> exclude_columns;
  std::string imputation = "train_mean";
  bool engineer_fico = true;
  std::string fico_feature_name = "fico_range_high";
};

inline void to_json(nlohmann::json& j, const PrepConfig& c) {
  j = nlohmann::json{{"target_column", c.target_column},
                     {"positive_label", c.positive_label},
                     {"negative_label", c.negative_label},
                     {"date_column", c.date_column},
                     {"split_cutoff", c.split_cutoff},
                     {"categorical_columns", c.categorical_columns},
                     {"include_columns", c.include_columns},
                     {"exclude_columns", c.exclude_columns},
                     {"imputation", c.imputation},
                     {"engineer_fico", c.engineer_fico},
                     {"fico_feature_name", c.fico_feature_name}};
}

inline std::optional<std::int32_t> parse_date(std::string_view text);

inline void from_json(const nlohmann::json& j, PrepConfig& c) {
  PrepConfig d;
  c.target_column = j.value("target_column", d.target_column);
  c.positive_label = j.value("positive_label", d.positive_label);
  c.negative_label = j.value("negative_label", d.negative_label);
  c.date_column = j.value("date_column", d.date_column);
  c.split_cutoff = j.value("split_cutoff", d.split_cutoff);
  c.categorical_columns = j.value("categorical_columns", d.categorical_columns);
  c.include_columns = j.value("include_columns", d.include_columns);
  c.exclude_columns = j.value("exclude_columns", d.exclude_columns);
  c.imputation = j.value("imputation", d.imputation);
  c.engineer_fico = j.value("engineer_fico", d.engineer_fico);
  c.fico_feature_name = j.value("fico_feature_name", d.fico_feature_name);
}

inline void validate(const PrepConfig& c) {
  if (c.positive_label == c.negative_label) {
    throw UsageError("prep config: positive and negative labels must differ");
  }
  if (!parse_date(c.split_cutoff)) {
    throw UsageError("prep config: unparseable split_cutoff '" + c.split_cutoff + "'");
  }
  if (c.imputation != "train_mean") {
    throw UsageError("prep config: unsupported imputation '" + c.imputation + "'");
  }
}

// Days since 1970-01-01. Accepts YYYY-MM-DD, YYYY-MM and Mon-YYYY (day 1).
inline std::optional<std::int32_t> parse_date(std::string_view text) {
  using namespace std::chrono;
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  auto to_int = [](std::string_view s, int& out) {
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
  };
  int y = 0, m = 0, d = 1;
  static constexpr std::array<std::string_view, 12> kMonths = {
      "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"};
  if (text.size() >= 8 && text[3] == '-' && std::isalpha(static_cast<unsigned char>(text[0]))) {
    std::string mon(text.substr(0, 3));
    for (auto& ch : mon) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    auto it = std::find(kMonths.begin(), kMonths.end(), mon);
    if (it == kMonths.end() || !to_int(text.substr(4), y)) return std::nullopt;
    m = static_cast<int>(it - kMonths.begin()) + 1;
  } else if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
    if (!to_int(text.substr(0, 4), y) || !to_int(text.substr(5, 2), m) ||
        !to_int(text.substr(8, 2), d))
      return std::nullopt;
  } else if (text.size() == 7 && text[4] == '-') {
    if (!to_int(text.substr(0, 4), y) || !to_int(text.substr(5, 2), m)) return std::nullopt;
  } else {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return static_cast<std::int32_t>(sys_days(ymd).time_since_epoch().count());
}

// Model-ready data. Rows of X align with y and w.
struct Dataset {
  Matrix X;
  std::vector<int> y;
  std::vector<double> w;
  std::vector<std::string> feature_names;

  std::size_t rows() const { return X.rows(); }
  std::size_t cols() const { return X.cols(); }

  std::size_t feature_index(std::string_view name) const {
    for (std::size_t j = 0; j < feature_names.size(); ++j)
      if (feature_names[j] == name) return j;
    throw DataError("unknown feature: " + std::string(name));
  }

  void validate() const {
    if (feature_names.size() != X.cols()) throw DataError("dataset: feature name count mismatch");
    if (y.size() != X.rows() || w.size() != X.rows()) throw DataError("dataset: row count mismatch");
    for (double v : X.data())
      if (!std::isfinite(v)) throw DataError("dataset: non-finite feature value");
    for (int v : y)
      if (v != 0 && v != 1) throw DataError("dataset: labels must be 0/1");
    for (double v : w)
      if (!(v > 0) || !std::isfinite(v)) throw DataError("dataset: weights must be positive");
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Copy of `data` restricted to the given columns, in the given order.
inline Dataset select_columns(const Dataset& data, std::span<const std::size_t> cols) {
  Dataset out;
  out.X = Matrix(data.rows(), cols.size());
  for (std::size_t i = 0; i < data.rows(); ++i)
    for (std::size_t k = 0; k < cols.size(); ++k) out.X(i, k) = data.X(i, cols[k]);
  out.y = data.y;
  out.w = data.w;
  for (auto c : cols) {
    if (c >= data.cols()) throw DataError("select_columns: column out of range");
    out.feature_names.push_back(data.feature_names[c]);
  }
  return out;
}

inline Dataset select_features(const Dataset& data, const std::vector<std::string>& names) {
  std::vector<std::size_t> cols;
  cols.reserve(names.size());
  for (const auto& n : names) cols.push_back(data.feature_index(n));
  return select_columns(data, cols);
}

inline Dataset select_rows(const Dataset& data, std::span<const std::size_t> rows) {
  Dataset out;
  out.X = Matrix(rows.size(), data.cols());
  out.feature_names = data.feature_names;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    auto src = data.X.row(rows[k]);
    std::copy(src.begin(), src.end(), out.X.row(k).begin());
    out.y.push_back(data.y[rows[k]]);
    out.w.push_back(data.w[rows[k]]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ingestion

inline bool is_missing_token(std::string_view s) {
  return s.empty();
}

inline Column make_column(std::string name, const std::vector<csv::Row>& rows, std::size_t idx,
                          std::optional<ColumnType> forced) {
  Column col;
  col.name = std::move(name);
  const std::size_t n = rows.size() - 1;
  auto cell = [&](std::size_t r) -> const std::string& { return rows[r + 1][idx]; };
  ColumnType type = ColumnType::kNumeric;
  if (forced) {
    type = *forced;
  } else {
    for (std::size_t r = 0; r < n; ++r) {
      double v;
      if (!is_missing_token(cell(r)) && !parse_double(cell(r), v)) {
        type = ColumnType::kCategorical;
        break;
      }
    }
  }
  col.type = type;
  switch (type) {
    case ColumnType::kNumeric:
      col.numeric.resize(n);
      for (std::size_t r = 0; r < n; ++r) {
        double v;
        if (is_missing_token(cell(r))) {
          col.numeric[r] = std::numeric_limits<double>::quiet_NaN();
        } else if (parse_double(cell(r), v)) {
          col.numeric[r] = v;
        } else {
          throw DataError("column '" + col.name + "': non-numeric cell '" + cell(r) + "'");
        }
      }
      break;
    case ColumnType::kCategorical:
      col.text.resize(n);
      for (std::size_t r = 0; r < n; ++r) col.text[r] = cell(r);
      break;
    case ColumnType::kDate:
      col.days.resize(n);
      for (std::size_t r = 0; r < n; ++r) {
        if (is_missing_token(cell(r))) {
          col.days[r] = kMissingDate;
          continue;
        }
        auto d = parse_date(cell(r));
        if (!d) throw DataError("column '" + col.name + "': unparseable date '" + cell(r) + "'");
        col.days[r] = *d;
      }
      break;
  }
  return col;
}

// Builds a typed table from parsed CSV rows (header first). The target and
// configured categoricals are forced categorical, the date column is parsed as
// dates, everything else is numeric iff every non-empty cell parses.
inline RawTable table_from_rows(std::vector<csv::Row> rows, const PrepConfig& config) {
  if (rows.empty()) throw DataError("csv: header row required");
  std::erase_if(rows, [](const csv::Row& r) { return r.size() == 1 && r[0].empty(); });
  if (rows.empty()) throw DataError("csv: header row required");
  const auto& header = rows.front();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw DataError("csv: row " + std::to_string(r + 1) + " has " +
                      std::to_string(rows[r].size()) + " fields, header has " +
                      std::to_string(header.size()));
    }
  }
  std::unordered_set<std::string> seen;
  for (const auto& h : header)
    if (!seen.insert(h).second) throw DataError("csv: duplicate column name: " + h);
  for (const auto* required : {&config.target_column, &config.date_column}) {
    if (!seen.count(*required)) throw DataError("missing column: " + *required);
  }
  for (const auto& c : config.categorical_columns)
    if (!seen.count(c)) throw DataError("missing column: " + c);

  const std::set<std::string> categorical(config.categorical_columns.begin(),
                                          config.categorical_columns.end());
  RawTable table;
  for (std::size_t k = 0; k < header.size(); ++k) {
    std::optional<ColumnType> forced;
    if (header[k] == config.target_column || categorical.count(header[k]))
      forced = ColumnType::kCategorical;
    if (header[k] == config.date_column) forced = ColumnType::kDate;
    table.add(make_column(header[k], rows, k, forced));
  }
  return table;
}

inline RawTable ingest_csv(const std::string& path, const PrepConfig& config) {
  return table_from_rows(csv::read_file(path), config);
}

// Keeps rows whose target is the positive or negative label and replaces the
// target with a numeric 0/1 column (negative -> 0, positive -> 1).
inline RawTable encode_target(RawTable table, const PrepConfig& config) {
  Column* target = table.find(config.target_column);
  if (!target) throw DataError("missing column: " + config.target_column);
  if (target->type != ColumnType::kCategorical) {
    throw DataError("target column must be categorical: " + config.target_column);
  }
  std::vector<bool> keep(table.rows());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    keep[i] = target->text[i] == config.positive_label || target->text[i] == config.negative_label;
  }
  table.filter_rows(keep);
  if (table.rows() == 0) throw DataError("encode_target: no rows carry the configured labels");
  target = table.find(config.target_column);
  target->numeric.resize(target->text.size());
  for (std::size_t i = 0; i < target->text.size(); ++i)
    target->numeric[i] = target->text[i] == config.positive_label ? 1.0 : 0.0;
  target->text.clear();
  target->type = ColumnType::kNumeric;
  return table;
}

// Replaces fico_range_low/high by their element-wise mean, named `output_name`.
// Tables without both columns pass through unchanged with a warning.
inline RawTable engineer_fico(RawTable table, const std::string& output_name = "fico_range_high",
                              std::vector<std::string>* warnings = nullptr) {
  const Column* lo = table.find("fico_range_low");
  const Column* hi = table.find("fico_range_high");
  if (!lo || !hi || lo->type != ColumnType::kNumeric || hi->type != ColumnType::kNumeric) {
    if (warnings) warnings->push_back("engineer_fico: numeric fico_range_low/high not found, skipped");
    return table;
  }
  Column avg;
  avg.name = output_name;
  avg.type = ColumnType::kNumeric;
  avg.numeric.resize(lo->numeric.size());
  for (std::size_t i = 0; i < avg.numeric.size(); ++i)
    avg.numeric[i] = 0.5 * (lo->numeric[i] + hi->numeric[i]);
  const std::size_t pos = std::min(table.index_of("fico_range_low"), table.index_of("fico_range_high"));
  table.remove("fico_range_low");
  table.remove("fico_range_high");
  table.insert(pos, std::move(avg));
  return table;
}

struct ClassWeights {
  double negative = 1.0;
  double positive = 1.0;
  double of(int label) const { return label == 1 ? positive : negative; }
};

// Balanced weights n / (2 n_c); the weighted total equals n.
inline ClassWeights class_weights(std::span<const int> y) {
  std::size_t n1 = 0;
  for (int v : y) n1 += v == 1;
  const std::size_t n0 = y.size() - n1;
  if (n0 == 0 || n1 == 0) throw DataError("class_weights: both classes must be present");
  const double n = static_cast<double>(y.size());
  return {n / (2.0 * static_cast<double>(n0)), n / (2.0 * static_cast<double>(n1))};
}

inline void apply_class_weights(Dataset& data, const ClassWeights& cw) {
  for (std::size_t i = 0; i < data.rows(); ++i) data.w[i] = cw.of(data.y[i]);
}

// Everything needed to reproduce a prepare() call.
struct PrepManifest {
  std::string split_cutoff;
  std::map<std::string, std::string> column_types;
  std::map<std::string, double> imputation_means;
  std::vector<std::string> dropped_columns;
  std::vector<std::string> feature_names;
  ClassWeights class_weights;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::vector<std::string> warnings;
};

inline void to_json(nlohmann::json& j, const PrepManifest& m) {
  j = nlohmann::json{{"split_cutoff", m.split_cutoff},
                     {"column_types", m.column_types},
                     {"imputation_means", m.imputation_means},
                     {"dropped_columns", m.dropped_columns},
                     {"feature_names", m.feature_names},
                     {"class_weights", {{"negative", m.class_weights.negative},
                                        {"positive", m.class_weights.positive}}},
                     {"train_rows", m.train_rows},
                     {"test_rows", m.test_rows},
                     {"warnings", m.warnings}};
}

struct PreparedData {
  Dataset train;
  Dataset test;
  PrepManifest manifest;
};

// One-hot, impute and split an encoded table. Train rows get balanced class
// weights computed on the train labels; test rows get unit weights.
inline PreparedData prepare(const RawTable& table, const PrepConfig& config) {
  validate(config);
  const Column* target = table.find(config.target_column);
  if (!target) throw DataError("missing column: " + config.target_column);
  if (target->type != ColumnType::kNumeric) {
    throw DataError("prepare: target column is not encoded (call encode_target first)");
  }
  const Column* date = table.find(config.date_column);
  if (!date || date->type != ColumnType::kDate) {
    throw DataError("prepare: date column missing or not parsed as dates: " + config.date_column);
  }
  const std::int32_t cutoff = *parse_date(config.split_cutoff);

  PreparedData out;
  auto& manifest = out.manifest;
  manifest.split_cutoff = config.split_cutoff;

  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    if (date->days[i] == kMissingDate) continue;
    (date->days[i] <= cutoff ? train_rows : test_rows).push_back(i);
  }
  if (train_rows.empty()) throw DataError("prepare: empty train split");
  if (test_rows.empty()) throw DataError("prepare: empty test split");

  const std::set<std::string> categorical(config.categorical_columns.begin(),
                                          config.categorical_columns.end());
  const std::set<std::string> excluded(config.exclude_columns.begin(), config.exclude_columns.end());
  const std::set<std::string> included(config.include_columns.begin(), config.include_columns.end());

  // Each output feature is produced by a closure over the source column.
  struct FeatureSource {
    std::string name;
    const Column* col;
    std::string category;  // one-hot level; "" with is_missing_level for the nan column
    bool one_hot = false;
    bool missing_level = false;
    double fill = 0.0;
  };
  std::vector<FeatureSource> sources;

  for (const auto& col : table.columns()) {
    if (col.name == config.target_column || col.name == config.date_column) continue;
    manifest.column_types[col.name] = to_string(col.type);
    if (excluded.count(col.name) || (!included.empty() && !included.count(col.name))) {
      manifest.dropped_columns.push_back(col.name);
      continue;
    }
    if (col.type == ColumnType::kNumeric) {
      double sum = 0.0;
      std::size_t cnt = 0;
      for (auto r : train_rows) {
        if (!std::isnan(col.numeric[r])) {
          sum += col.numeric[r];
          ++cnt;
        }
      }
      if (cnt == 0) {
        manifest.warnings.push_back("column '" + col.name + "' has no observed train values, dropped");
        manifest.dropped_columns.push_back(col.name);
        continue;
      }
      const double mean = sum / static_cast<double>(cnt);
      manifest.imputation_means[col.name] = mean;
      sources.push_back({col.name, &col, "", false, false, mean});
    } else if (col.type == ColumnType::kCategorical && categorical.count(col.name)) {
      // Levels in order of first appearance, train rows before test rows.
      std::vector<std::string> levels;
      std::unordered_set<std::string> seen;
      bool has_missing = false;
      for (const auto* rows : {&train_rows, &test_rows}) {
        for (auto r : *rows) {
          if (col.text[r].empty())
            has_missing = true;
          else if (seen.insert(col.text[r]).second)
            levels.push_back(col.text[r]);
        }
      }
      for (const auto& lv : levels) sources.push_back({col.name + "_" + lv, &col, lv, true, false, 0});
      if (has_missing) sources.push_back({col.name + "_nan", &col, "", true, true, 0});
    } else {
      manifest.warnings.push_back("column '" + col.name + "' is " + to_string(col.type) +
                                  " and not configured for one-hot, dropped");
      manifest.dropped_columns.push_back(col.name);
    }
  }
  if (sources.empty()) throw DataError("prepare: no feature columns remain");

  std::unordered_set<std::string> names;
  for (const auto& s : sources) {
    if (!names.insert(s.name).second) throw DataError("prepare: duplicate feature name " + s.name);
    manifest.feature_names.push_back(s.name);
  }

  auto build = [&](const std::vector<std::size_t>& rows) {
    Dataset ds;
    ds.feature_names = manifest.feature_names;
    ds.X = Matrix(rows.size(), sources.size());
    ds.y.resize(rows.size());
    ds.w.assign(rows.size(), 1.0);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto r = rows[k];
      const double label = target->numeric[r];
      if (label != 0.0 && label != 1.0) throw DataError("prepare: target must be 0/1");
      ds.y[k] = static_cast<int>(label);
      for (std::size_t j = 0; j < sources.size(); ++j) {
        const auto& s = sources[j];
        double v;
        if (s.one_hot) {
          const auto& cell = s.col->text[r];
          v = s.missing_level ? (cell.empty() ? 1.0 : 0.0) : (cell == s.category ? 1.0 : 0.0);
        } else {
          v = s.col->numeric[r];
          if (std::isnan(v)) v = s.fill;
        }
        ds.X(k, j) = v;
      }
    }
    return ds;
  };
  out.train = build(train_rows);
  out.test = build(test_rows);
  const auto positives = std::count(out.train.y.begin(), out.train.y.end(), 1);
  if (positives == 0 || positives == static_cast<std::ptrdiff_t>(out.train.rows())) {
    manifest.warnings.push_back("train split holds a single class, class weights left at 1");
  } else {
    manifest.class_weights = class_weights(out.train.y);
    apply_class_weights(out.train, manifest.class_weights);
  }
  manifest.train_rows = train_rows.size();
  manifest.test_rows = test_rows.size();
  out.train.validate();
  out.test.validate();
  return out;
}

// Full chain from a CSV file: ingest, encode target, optional fico averaging, prepare.
inline PreparedData prepare_csv(const std::string& path, const PrepConfig& config) {
  validate(config);
  std::vector<std::string> warnings;
  RawTable table = encode_target(ingest_csv(path, config), config);
  if (config.engineer_fico) table = engineer_fico(std::move(table), config.fico_feature_name, &warnings);
  PreparedData out = prepare(table, config);
  out.manifest.warnings.insert(out.manifest.warnings.begin(), warnings.begin(), warnings.end());
  return out;
}

struct Standardization {
  std::vector<double> means;
  std::vector<double> stddevs;  // 0 marks a zero-variance column
};

inline Standardization compute_standardization(const Matrix& X) {
  Standardization s;
  const std::size_t n = X.rows(), d = X.cols();
  s.means.assign(d, 0.0);
  s.stddevs.assign(d, 0.0);
  if (n == 0) return s;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) s.means[j] += X(i, j);
  for (auto& m : s.means) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double c = X(i, j) - s.means[j];
      s.stddevs[j] += c * c;
    }
  for (auto& v : s.stddevs) {
    v = std::sqrt(v / static_cast<double>(n));
    if (v < 1e-12) v = 0.0;
  }
  return s;
}

inline double standardize_value(double x, double mean, double stddev) {
  return stddev > 0 ? (x - mean) / stddev : 0.0;
}

inline Matrix apply_standardization(const Matrix& X, const Standardization& s) {
  Matrix out(X.rows(), X.cols());
  for (std::size_t i = 0; i < X.rows(); ++i)
    for (std::size_t j = 0; j < X.cols(); ++j)
      out(i, j) = standardize_value(X(i, j), s.means[j], s.stddevs[j]);
  return out;
}

struct StandardizedPair {
  Dataset train;
  Dataset test;
  Standardization stats;
};

// Z-scores both splits with train population statistics.
inline StandardizedPair standardize(const Dataset& train, const Dataset& test) {
  StandardizedPair out{train, test, compute_standardization(train.X)};
  out.train.X = apply_standardization(train.X, out.stats);
  out.test.X = apply_standardization(test.X, out.stats);
  return out;
}

// ---------------------------------------------------------------------------
// Prepared-dataset cache: feature columns followed by __label and __weight.

inline constexpr const char* kLabelColumn = "__label";
inline constexpr const char* kWeightColumn = "__weight";

inline void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::vector<csv::Row> rows;
  rows.reserve(data.rows() + 1);
  csv::Row header = data.feature_names;
  header.push_back(kLabelColumn);
  header.push_back(kWeightColumn);
  rows.push_back(std::move(header));
  for (std::size_t i = 0; i < data.rows(); ++i) {
    csv::Row r;
    r.reserve(data.cols() + 2);
    for (double v : data.X.row(i)) r.push_back(format_double(v));
    r.push_back(std::to_string(data.y[i]));
    r.push_back(format_double(data.w[i]));
    rows.push_back(std::move(r));
  }
  csv::write_file(path, rows);
}

inline Dataset read_dataset_csv(const std::string& path) {
  auto rows = csv::read_file(path);
  std::erase_if(rows, [](const csv::Row& r) { return r.size() == 1 && r[0].empty(); });
  if (rows.empty()) throw DataError("dataset csv: header row required: " + path);
  const auto& header = rows.front();
  if (header.size() < 3 || header[header.size() - 2] != kLabelColumn ||
      header.back() != kWeightColumn) {
    throw DataError("dataset csv: expected trailing __label,__weight columns: " + path);
  }
  Dataset ds;
  ds.feature_names.assign(header.begin(), header.end() - 2);
  const std::size_t d = ds.feature_names.size();
  ds.X = Matrix(rows.size() - 1, d);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw DataError("dataset csv: ragged row " + std::to_string(r + 1) + " in " + path);
    }
    for (std::size_t j = 0; j < d; ++j) {
      double v;
      if (!parse_double(rows[r][j], v)) throw DataError("dataset csv: bad number '" + rows[r][j] + "'");
      ds.X(r - 1, j) = v;
    }
    double label, weight;
    if (!parse_double(rows[r][d], label) || !parse_double(rows[r][d + 1], weight)) {
      throw DataError("dataset csv: bad label/weight in row " + std::to_string(r + 1));
    }
    ds.y.push_back(static_cast<int>(label));
    ds.w.push_back(weight);
  }
  ds.validate();
  return ds;
}

}  // namespace glassbox
