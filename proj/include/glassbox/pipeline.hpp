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

// Base model -> ranking -> reduced glass-box model, plus the feature-count
// and interaction sweeps and correlation refinement of the selected set.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "glassbox/dataset.hpp"
#include "glassbox/ebm.hpp"
#include "glassbox/hash.hpp"
#include "glassbox/metrics.hpp"
#include "glassbox/models.hpp"
#include "glassbox/ranking.hpp"
#include "glassbox/serialize.hpp"
#include "glassbox/shap.hpp"
#include "glassbox/synth.hpp"

namespace glassbox::pipeline {

struct StepResult {
  AnyModel model;
  metrics::MetricReport train;
  metrics::MetricReport test;
};

inline StepResult evaluate_model(AnyModel model, const Dataset& train, const Dataset& test, double threshold) {
  StepResult r{std::move(model), {}, {}};
  r.train = metrics::evaluate(predict_proba(r.model, train.X), train.y, threshold);
  r.test = metrics::evaluate(predict_proba(r.model, test.X), test.y, threshold);
  return r;
}

// Step 1: base model on all features.
inline StepResult step1_train_base(const Dataset& train, const Dataset& test, ModelKind kind,
                                   const ModelConfigs& cfg = {}, double threshold = 0.5) {
  if (kind == ModelKind::kPltr) throw UsageError("step1: base model must be lr, gbdt or ebm");
  return evaluate_model(train_model(kind, train, cfg), train, test, threshold);
}

enum class RankMethod { kCoef, kShap, kEbm };

inline RankMethod parse_rank_method(std::string_view s) {
  if (s == "coef") return RankMethod::kCoef;
  if (s == "shap") return RankMethod::kShap;
  if (s == "ebm") return RankMethod::kEbm;
  throw UsageError("unknown ranking method: " + std::string(s));
}

inline RankMethod default_rank_method(ModelKind k) {
  switch (k) {
    case ModelKind::kLr: return RankMethod::kCoef;
    case ModelKind::kGbdt: return RankMethod::kShap;
    case ModelKind::kEbm: return RankMethod::kEbm;
    default: throw UsageError("no ranking method for model kind " + std::string(to_string(k)));
  }
}

// Step 2: importance ranking over encoded columns.
inline RankedFeatures step2_rank(const AnyModel& model, const Dataset& data, RankMethod method) {
  switch (method) {
    case RankMethod::kCoef: {
      const auto* lr = std::get_if<linear::LinearModel>(&model);
      if (!lr) throw UsageError("rank: coef ranking requires an lr model");
      // Coefficients on the standardized scale.
      std::vector<double> scale(lr->dim(), 1.0);
      if (!lr->standardization) {
        const auto st = compute_standardization(data.X);
        scale = st.stddevs;
      }
      std::vector<double> score(lr->dim());
      for (std::size_t j = 0; j < lr->dim(); ++j) score[j] = std::abs(lr->coefficients[j]) * scale[j];
      return rank_by_score(lr->feature_names, score, "coef", "lr");
    }
    case RankMethod::kShap: {
      const auto* g = std::get_if<gbdt::GbdtModel>(&model);
      if (!g) throw UsageError("rank: shap ranking requires a gbdt model");
      return shap::global_importance(*g, data);
    }
    case RankMethod::kEbm: {
      const auto* e = std::get_if<ebm::EbmModel>(&model);
      if (!e) throw UsageError("rank: ebm ranking requires an ebm model");
      return ebm::importance_ebm(*e, data).features;
    }
  }
  throw UsageError("unknown ranking method");
}

inline std::vector<std::string> top_k(const RankedFeatures& ranked, std::size_t k, std::size_t d) {
  if (k == 0 || k > d || k > ranked.size())
    throw UsageError("k = " + std::to_string(k) + " out of range [1, " + std::to_string(std::min(d, ranked.size())) +
                     "]");
  return ranked.top(k);
}

// Step 3: glass-box (or reference) model on the top-k columns.
inline StepResult step3_train_reduced(const Dataset& train, const Dataset& test, const RankedFeatures& ranked,
                                      std::size_t k, ModelKind kind, const ModelConfigs& cfg = {},
                                      double threshold = 0.5) {
  const auto names = top_k(ranked, k, train.cols());
  const Dataset tr = select_features(train, names), te = select_features(test, names);
  return evaluate_model(train_model(kind, tr, cfg), tr, te, threshold);
}

// ---------------------------------------------------------------------------
// Reports

struct ExperimentRow {
  std::string model_kind;
  std::string variant;  // "", or "unrefined" / "refined" in the refinement report
  std::size_t k = 0;
  std::size_t pairs = 0;
  std::string feature_hash;
  std::vector<std::string> features;
  metrics::MetricReport train;
  metrics::MetricReport test;
};

struct ExperimentReport {
  std::string name;
  std::vector<ExperimentRow> rows;
  nlohmann::json config = nlohmann::json::object();
  // sweep_k: plateau k per model kind (absent when undetected or a single k).
  std::map<std::string, std::optional<std::size_t>> plateau;
  // sweep_interactions: max over p of (F1_p - F1_0) / F1_0.
  std::optional<double> max_f1_improvement;
  std::vector<std::string> notes;

  const ExperimentRow* find(const std::string& kind, std::size_t k, std::size_t pairs = 0) const {
    for (const auto& r : rows)
      if (r.model_kind == kind && r.k == k && r.pairs == pairs) return &r;
    return nullptr;
  }
};

inline void to_json(nlohmann::json& j, const ExperimentRow& r) {
  j = nlohmann::json{{"model_kind", r.model_kind}, {"variant", r.variant}, {"k", r.k}, {"pairs", r.pairs},
                     {"feature_hash", r.feature_hash}, {"features", r.features}, {"train", r.train},
                     {"test", r.test}};
}

inline void to_json(nlohmann::json& j, const ExperimentReport& r) {
  nlohmann::json plateau = nlohmann::json::object();
  for (const auto& [kind, k] : r.plateau) plateau[kind] = k ? nlohmann::json(*k) : nlohmann::json();
  j = nlohmann::json{{"name", r.name},
                     {"rows", r.rows},
                     {"config", r.config},
                     {"plateau", plateau},
                     {"max_f1_improvement", r.max_f1_improvement ? nlohmann::json(*r.max_f1_improvement) : nlohmann::json()},
                     {"notes", r.notes},
                     {"deterministic", true},
                     {"toolkit_version", kToolkitVersion}};
}

inline std::vector<csv::Row> report_csv(const ExperimentReport& r) {
  std::vector<csv::Row> rows{{"model_kind", "variant", "k", "pairs", "feature_hash", "split", "auprc", "auroc", "f1",
                              "balanced_accuracy", "log_loss", "threshold", "degenerate"}};
  for (const auto& row : r.rows)
    for (const auto* split : {"train", "test"}) {
      const auto& m = std::string(split) == "train" ? row.train : row.test;
      rows.push_back({row.model_kind, row.variant, std::to_string(row.k), std::to_string(row.pairs), row.feature_hash, split,
                      format_double(m.auprc), format_double(m.auroc), format_double(m.f1),
                      format_double(m.balanced_accuracy), format_double(m.log_loss), format_double(m.threshold),
                      m.degenerate ? "1" : "0"});
    }
  return rows;
}

inline ExperimentRow make_row(ModelKind kind, std::vector<std::string> features, std::size_t pairs, const StepResult& r) {
  ExperimentRow row;
  row.model_kind = to_string(kind);
  row.k = features.size();
  row.pairs = pairs;
  row.feature_hash = names_hash(features);
  row.features = std::move(features);
  row.train = r.train;
  row.test = r.test;
  return row;
}

inline constexpr double kPlateauEpsilon = 0.002;

// Smallest k whose test AUPRC gain to the next k is below epsilon.
inline std::optional<std::size_t> plateau_point(const std::vector<std::size_t>& ks, const std::vector<double>& auprc,
                                                double epsilon) {
  for (std::size_t i = 0; i + 1 < ks.size(); ++i)
    if (auprc[i + 1] - auprc[i] < epsilon) return ks[i];
  return std::nullopt;
}

inline ExperimentReport sweep_k(const Dataset& train, const Dataset& test, const RankedFeatures& ranked,
                                const std::vector<std::size_t>& ks, const std::vector<ModelKind>& kinds,
                                const ModelConfigs& cfg = {}, double epsilon = kPlateauEpsilon,
                                double threshold = 0.5) {
  if (!std::is_sorted(ks.begin(), ks.end()) || std::adjacent_find(ks.begin(), ks.end()) != ks.end())
    throw UsageError("sweep_k: ks must be strictly ascending");
  ExperimentReport report;
  report.name = "sweep_k";
  report.config = {{"ks", ks}, {"epsilon", epsilon}, {"threshold", threshold}};
  for (auto kind : kinds) {
    std::vector<double> auprc;
    for (auto k : ks) {
      const auto r = step3_train_reduced(train, test, ranked, k, kind, cfg, threshold);
      report.rows.push_back(make_row(kind, ranked.top(k), 0, r));
      auprc.push_back(r.test.auprc);
    }
    report.plateau[to_string(kind)] = plateau_point(ks, auprc, epsilon);
  }
  return report;
}

// EBM on the top-k columns with 0..max pairs. Pairs are detected once on the
// main-effects model, so each row adds the next-ranked pair.
inline ExperimentReport sweep_interactions(const Dataset& train, const Dataset& test, const RankedFeatures& ranked,
                                           std::size_t k, const std::vector<std::size_t>& pair_counts,
                                           const ModelConfigs& cfg = {}, double threshold = 0.5) {
  const auto names = top_k(ranked, k, train.cols());
  const Dataset tr = select_features(train, names), te = select_features(test, names);
  ebm::EbmConfig main_cfg = cfg.ebm;
  main_cfg.n_pairs = 0;
  const ebm::EbmModel main = ebm::fit_main_effects(tr, main_cfg);
  const std::size_t most = pair_counts.empty() ? 0 : *std::max_element(pair_counts.begin(), pair_counts.end());
  const auto pairs = ebm::detect_pairs(tr, main, most);
  ExperimentReport report;
  report.name = "sweep_interactions";
  report.config = {{"k", k}, {"pair_counts", pair_counts}, {"threshold", threshold}};
  nlohmann::json detected = nlohmann::json::array();
  for (auto [a, b] : pairs) detected.push_back({names[a], names[b]});
  report.config["detected_pairs"] = detected;
  std::optional<double> f1_zero;
  double best = -std::numeric_limits<double>::infinity();
  for (auto p : pair_counts) {
    const std::size_t use = std::min(p, pairs.size());
    if (use < p) report.notes.push_back("only " + std::to_string(pairs.size()) + " pairs available");
    std::vector<ebm::FeaturePair> subset(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(use));
    ebm::EbmModel m = ebm::fit_pairs(tr, main, subset);
    m.config.n_pairs = static_cast<int>(use);
    const auto r = evaluate_model(std::move(m), tr, te, threshold);
    report.rows.push_back(make_row(ModelKind::kEbm, names, use, r));
    if (use == 0) f1_zero = r.test.f1;
  }
  if (f1_zero && *f1_zero > 0) {
    for (const auto& row : report.rows)
      if (row.pairs > 0) best = std::max(best, (row.test.f1 - *f1_zero) / *f1_zero);
    if (std::isfinite(best)) report.max_f1_improvement = best;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Correlation refinement

struct RefinementConfig {
  std::size_t pool = 25;
  std::size_t target = 20;
  std::size_t protected_top = 10;
  double threshold = 0.7;
  std::string kind = "pearson";
};

inline void to_json(nlohmann::json& j, const RefinementConfig& c) {
  j = nlohmann::json{{"pool", c.pool}, {"target", c.target}, {"protected", c.protected_top},
                     {"threshold", c.threshold}, {"kind", c.kind}};
}

inline void from_json(const nlohmann::json& j, RefinementConfig& c) {
  const RefinementConfig d;
  c.pool = j.value("pool", d.pool);
  c.target = j.value("target", d.target);
  c.protected_top = j.value("protected", d.protected_top);
  c.threshold = j.value("threshold", d.threshold);
  c.kind = j.value("kind", d.kind);
}

inline void validate(const RefinementConfig& c) {
  if (!(c.protected_top <= c.target && c.target <= c.pool)) throw UsageError("refine: need protected <= target <= pool");
  if (c.target == 0) throw UsageError("refine: target must be >= 1");
  if (!(c.threshold >= 0 && c.threshold <= 1)) throw UsageError("refine: threshold must lie in [0, 1]");
  if (c.kind != "pearson") throw UsageError("refine: unsupported correlation kind " + c.kind);
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  if (n == 0) return 0.0;
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0 || sbb <= 0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

struct DroppedFeature {
  std::string name;
  std::string kept;  // the higher-ranked partner
  double correlation;
};

struct RefinementResult {
  RankedFeatures features;  // refined set in original rank order
  std::vector<DroppedFeature> dropped;
  std::vector<std::string> diagnostics;
};

inline RefinementResult refine_correlation(const Dataset& train, const RankedFeatures& ranked,
                                           const RefinementConfig& config = {}) {
  validate(config);
  if (config.pool > ranked.size())
    throw UsageError("refine: pool " + std::to_string(config.pool) + " exceeds " + std::to_string(ranked.size()) +
                     " ranked features");
  std::map<std::size_t, std::vector<double>> columns;  // by rank
  auto column = [&](std::size_t rank) -> const std::vector<double>& {
    auto it = columns.find(rank);
    if (it == columns.end()) it = columns.emplace(rank, train.X.column(train.feature_index(ranked.names[rank]))).first;
    return it->second;
  };
  std::map<std::pair<std::size_t, std::size_t>, double> rho;
  auto corr = [&](std::size_t a, std::size_t b) {
    const auto key = std::minmax(a, b);
    auto it = rho.find(key);
    if (it == rho.end()) it = rho.emplace(key, pearson(column(key.first), column(key.second))).first;
    return it->second;
  };

  RefinementResult out;
  std::vector<std::size_t> current;  // ranks, ascending
  std::size_t next = 0;
  auto backfill = [&] {
    while (current.size() < config.target && next < ranked.size()) {
      if (next == config.pool)
        out.diagnostics.push_back("pool of " + std::to_string(config.pool) + " exhausted; backfilling beyond it");
      current.push_back(next++);
    }
    std::sort(current.begin(), current.end());
  };
  backfill();
  while (true) {
    // Highest |rho| above threshold whose lower-ranked member is droppable;
    // equal |rho| resolves towards the higher-ranked pair.
    bool found = false;
    double best = 0;
    std::size_t keep = 0, drop = 0;
    for (std::size_t a = 0; a < current.size(); ++a)
      for (std::size_t b = a + 1; b < current.size(); ++b) {
        const std::size_t hi = current[a], lo = current[b];
        if (lo < config.protected_top) continue;
        const double r = std::abs(corr(hi, lo));
        if (r > config.threshold && (!found || r > best)) {
          found = true;
          best = r;
          keep = hi;
          drop = lo;
        }
      }
    if (!found) break;
    out.dropped.push_back({ranked.names[drop], ranked.names[keep], corr(keep, drop)});
    current.erase(std::find(current.begin(), current.end(), drop));
    backfill();
  }
  if (current.size() < config.target)
    out.diagnostics.push_back("best effort: only " + std::to_string(current.size()) + " of " +
                              std::to_string(config.target) + " features remain");
  std::vector<std::string> names;
  std::vector<double> scores;
  for (auto r : current) {
    names.push_back(ranked.names[r]);
    scores.push_back(ranked.scores[r]);
  }
  out.features = rank_by_score(names, scores, "refined", ranked.source_model);
  return out;
}

// ---------------------------------------------------------------------------
// Full run

struct SweepKConfig {
  std::vector<std::size_t> ks;
  std::vector<std::string> kinds{"ebm"};
  double epsilon = kPlateauEpsilon;
};

struct SweepPairsConfig {
  std::size_t k = 10;
  std::vector<std::size_t> pair_counts{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
};

struct RefineRunConfig {
  RefinementConfig refinement;
  std::vector<std::string> kinds{"gbdt", "ebm"};
};

struct ExperimentConfig {
  std::string name = "experiment";
  // Exactly one data source.
  std::optional<synth::SynthConfig> synthetic;
  std::string csv_path;
  std::string train_csv, test_csv;  // prepared caches
  PrepConfig prep;
  double threshold = 0.5;
  std::vector<std::string> base_kinds{"lr", "gbdt", "ebm"};
  std::string rank_model = "gbdt";
  std::string rank_method;  // empty: default for rank_model
  std::size_t k = 10;
  std::vector<std::string> reduced_kinds{"ebm", "pltr"};
  ModelConfigs models;
  std::optional<SweepKConfig> sweep_k;
  std::optional<SweepPairsConfig> sweep_pairs;
  std::optional<RefineRunConfig> refine;
  nlohmann::json raw = nlohmann::json::object();
};

inline ExperimentConfig parse_experiment(const nlohmann::json& j) {
  try {
    ExperimentConfig c;
    c.raw = j;
    c.name = j.value("name", c.name);
    const auto& data = j.at("data");
    int sources = 0;
    if (data.contains("synthetic")) {
      c.synthetic = data.at("synthetic").get<synth::SynthConfig>();
      ++sources;
    }
    if (data.contains("csv")) {
      c.csv_path = data.at("csv").get<std::string>();
      ++sources;
    }
    if (data.contains("train_csv") || data.contains("test_csv")) {
      c.train_csv = data.at("train_csv").get<std::string>();
      c.test_csv = data.at("test_csv").get<std::string>();
      ++sources;
    }
    if (sources != 1) throw UsageError("config: data needs exactly one of synthetic, csv, train_csv/test_csv");
    if (j.contains("prep")) c.prep = j.at("prep").get<PrepConfig>();
    c.threshold = j.value("threshold", c.threshold);
    if (!(c.threshold > 0 && c.threshold < 1)) throw UsageError("config: threshold must lie in (0, 1)");
    c.base_kinds = j.value("base_kinds", c.base_kinds);
    c.rank_model = j.value("rank_model", c.rank_model);
    c.rank_method = j.value("rank_method", c.rank_method);
    c.k = j.value("k", c.k);
    c.reduced_kinds = j.value("reduced_kinds", c.reduced_kinds);
    if (j.contains("models")) c.models = j.at("models").get<ModelConfigs>();
    if (j.contains("sweep_k")) {
      SweepKConfig s;
      s.ks = j.at("sweep_k").at("ks").get<std::vector<std::size_t>>();
      s.kinds = j.at("sweep_k").value("kinds", s.kinds);
      s.epsilon = j.at("sweep_k").value("epsilon", s.epsilon);
      c.sweep_k = s;
    }
    if (j.contains("sweep_pairs")) {
      SweepPairsConfig s;
      s.k = j.at("sweep_pairs").value("k", s.k);
      s.pair_counts = j.at("sweep_pairs").value("pair_counts", s.pair_counts);
      c.sweep_pairs = s;
    }
    if (j.contains("refine")) {
      RefineRunConfig r;
      r.refinement = j.at("refine").get<RefinementConfig>();
      r.kinds = j.at("refine").value("kinds", r.kinds);
      validate(r.refinement);
      c.refine = r;
    }
    if (std::find(c.base_kinds.begin(), c.base_kinds.end(), c.rank_model) == c.base_kinds.end())
      throw UsageError("config: rank_model must be one of base_kinds");
    for (const auto& k : c.base_kinds) parse_model_kind(k);
    for (const auto& k : c.reduced_kinds) parse_model_kind(k);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
}

inline PreparedData load_data(const ExperimentConfig& c) {
  if (c.synthetic) return synth::generate_prepared(*c.synthetic);
  if (!c.csv_path.empty()) {
    if (!std::filesystem::exists(c.csv_path)) throw DataError("dataset not found: " + c.csv_path);
    return prepare_csv(c.csv_path, c.prep);
  }
  PreparedData p;
  p.train = read_dataset_csv(c.train_csv);
  p.test = read_dataset_csv(c.test_csv);
  if (p.train.feature_names != p.test.feature_names) throw DataError("train/test feature names differ");
  p.manifest.feature_names = p.train.feature_names;
  p.manifest.train_rows = p.train.rows();
  p.manifest.test_rows = p.test.rows();
  return p;
}

// Holds <dir>/.lock for the lifetime of the object.
class DirectoryLock {
 public:
  explicit DirectoryLock(const std::filesystem::path& dir) : path_(dir / ".lock") {
    std::FILE* f = std::fopen(path_.string().c_str(), "wx");
    if (!f) throw UsageError("output directory is locked by another run: " + path_.string());
    std::fclose(f);
  }
  ~DirectoryLock() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  std::filesystem::path path_;
};

struct RunResult {
  std::filesystem::path manifest_path;
  std::string manifest_hash;
  nlohmann::json manifest;
  std::vector<ExperimentReport> reports;
};

namespace internal {

template <typename F>
auto stage(int index, const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), "[stage " + std::to_string(index) + ": " + name + "] " + e.what());
  }
}

class OutputWriter {
 public:
  explicit OutputWriter(std::filesystem::path root) : root_(std::move(root)) {}

  void text(const std::string& rel, const std::string& content) {
    const auto path = root_ / rel;
    std::filesystem::create_directories(path.parent_path());
    write_text(path.string(), content);
    files_.push_back({{"path", rel}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
  }
  void json_file(const std::string& rel, const nlohmann::json& j) { text(rel, dump(j)); }
  void csv_file(const std::string& rel, const std::vector<csv::Row>& rows) {
    std::ostringstream ss;
    for (const auto& r : rows) csv::write_row(ss, r);
    text(rel, ss.str());
  }
  const nlohmann::json& files() const { return files_; }

 private:
  std::filesystem::path root_;
  nlohmann::json files_ = nlohmann::json::array();
};

}  // namespace internal

inline void write_report(internal::OutputWriter& out, const std::string& stem, const ExperimentReport& r) {
  out.json_file("reports/" + stem + ".json", r);
  out.csv_file("reports/" + stem + ".csv", report_csv(r));
}

inline RunResult run_full(const ExperimentConfig& config, const std::filesystem::path& output_dir) {
  std::filesystem::create_directories(output_dir);
  DirectoryLock lock(output_dir);
  internal::OutputWriter out(output_dir);
  RunResult result;

  const PreparedData data = internal::stage(0, "load", [&] { return load_data(config); });
  const Dataset& train = data.train;
  const Dataset& test = data.test;
  const std::string data_hash = sha256_hex(dump(nlohmann::json(data.manifest)));
  out.json_file("data/prep_manifest.json", data.manifest);

  ModelMetadata meta;
  meta.train_manifest_hash = data_hash;

  std::map<std::string, StepResult> base;
  internal::stage(1, "base models", [&] {
    ExperimentReport report;
    report.name = "step1_base";
    report.config = {{"kinds", config.base_kinds}, {"threshold", config.threshold}};
    for (const auto& k : config.base_kinds) {
      const auto kind = parse_model_kind(k);
      auto r = step1_train_base(train, test, kind, config.models, config.threshold);
      out.json_file("models/base_" + k + ".json", model_to_json(r.model, meta));
      report.rows.push_back(make_row(kind, train.feature_names, 0, r));
      base.emplace(k, std::move(r));
    }
    write_report(out, "step1_base", report);
    result.reports.push_back(std::move(report));
    return 0;
  });

  const RankedFeatures ranked = internal::stage(2, "ranking", [&] {
    const auto& model = base.at(config.rank_model).model;
    const auto method = config.rank_method.empty() ? default_rank_method(kind_of(model))
                                                   : parse_rank_method(config.rank_method);
    auto r = step2_rank(model, train, method);
    out.json_file("rankings/" + config.rank_model + ".json", r);
    return r;
  });

  internal::stage(3, "reduced models", [&] {
    ExperimentReport report;
    report.name = "step3_reduced";
    report.config = {{"k", config.k}, {"kinds", config.reduced_kinds}, {"threshold", config.threshold}};
    for (const auto& k : config.reduced_kinds) {
      const auto kind = parse_model_kind(k);
      auto r = step3_train_reduced(train, test, ranked, config.k, kind, config.models, config.threshold);
      out.json_file("models/reduced_" + k + "_k" + std::to_string(config.k) + ".json", model_to_json(r.model, meta));
      report.rows.push_back(make_row(kind, ranked.top(config.k), 0, r));
    }
    write_report(out, "step3_reduced", report);
    result.reports.push_back(std::move(report));
    return 0;
  });

  if (config.sweep_k) {
    internal::stage(4, "sweep_k", [&] {
      std::vector<ModelKind> kinds;
      for (const auto& k : config.sweep_k->kinds) kinds.push_back(parse_model_kind(k));
      auto r = sweep_k(train, test, ranked, config.sweep_k->ks, kinds, config.models, config.sweep_k->epsilon,
                       config.threshold);
      write_report(out, "sweep_k", r);
      result.reports.push_back(std::move(r));
      return 0;
    });
  }
  if (config.sweep_pairs) {
    internal::stage(5, "sweep_pairs", [&] {
      auto r = sweep_interactions(train, test, ranked, config.sweep_pairs->k, config.sweep_pairs->pair_counts,
                                  config.models, config.threshold);
      write_report(out, "sweep_pairs", r);
      result.reports.push_back(std::move(r));
      return 0;
    });
  }
  if (config.refine) {
    internal::stage(6, "refine", [&] {
      const auto refined = refine_correlation(train, ranked, config.refine->refinement);
      nlohmann::json dropped = nlohmann::json::array();
      for (const auto& d : refined.dropped)
        dropped.push_back({{"name", d.name}, {"kept", d.kept}, {"correlation", d.correlation}});
      out.json_file("rankings/refined.json",
                    {{"ranking", refined.features}, {"dropped", dropped}, {"diagnostics", refined.diagnostics},
                     {"config", config.refine->refinement}});
      ExperimentReport report;
      report.name = "refined";
      report.config = {{"refinement", config.refine->refinement}, {"kinds", config.refine->kinds}};
      report.notes = refined.diagnostics;
      const std::size_t target = config.refine->refinement.target;
      for (const auto& k : config.refine->kinds) {
        const auto kind = parse_model_kind(k);
        const auto unrefined = step3_train_reduced(train, test, ranked, target, kind, config.models, config.threshold);
        report.rows.push_back(make_row(kind, ranked.top(target), 0, unrefined));
        report.rows.back().variant = "unrefined";
        const auto r = step3_train_reduced(train, test, refined.features, refined.features.size(), kind,
                                           config.models, config.threshold);
        out.json_file("models/refined_" + k + ".json", model_to_json(r.model, meta));
        report.rows.push_back(make_row(kind, refined.features.names, 0, r));
        report.rows.back().variant = "refined";
      }
      write_report(out, "refined", report);
      result.reports.push_back(std::move(report));
      return 0;
    });
  }

  nlohmann::json manifest{{"toolkit_version", kToolkitVersion},
                          {"format_version", kFormatVersion},
                          {"config", config.raw},
                          {"data_hash", data_hash},
                          {"files", out.files()}};
  const std::string text = dump(manifest);
  result.manifest_path = output_dir / "manifest.json";
  write_text(result.manifest_path.string(), text);
  result.manifest_hash = sha256_hex(text);
  result.manifest = std::move(manifest);
  return result;
}

}  // namespace glassbox::pipeline
