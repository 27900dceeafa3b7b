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

// JSON persistence for models and configs. Doubles are written in shortest
// round-trip form, so a reloaded model predicts bit-identically.

#pragma once

#include <fstream>
#include <string>

#include "glassbox/hash.hpp"
#include "glassbox/models.hpp"
#include "json.hpp"

namespace glassbox {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;

// ---------------------------------------------------------------------------
// Configs

namespace linear {
inline void to_json(json& j, const SolverSettings& s) {
  j = json{{"max_iter", s.max_iter}, {"tol", s.tol}, {"ridge", s.ridge}, {"standardize", s.standardize}};
}
inline void from_json(const json& j, SolverSettings& s) {
  const SolverSettings d;
  s.max_iter = j.value("max_iter", d.max_iter);
  s.tol = j.value("tol", d.tol);
  s.ridge = j.value("ridge", d.ridge);
  s.standardize = j.value("standardize", d.standardize);
}
inline void to_json(json& j, const AdaptiveLassoOptions& o) {
  j = json{{"gamma", o.gamma},           {"eps_w", o.eps_w}, {"max_outer", o.max_outer},
           {"max_passes", o.max_passes}, {"tol", o.tol},     {"initial", o.initial}};
}
inline void from_json(const json& j, AdaptiveLassoOptions& o) {
  const AdaptiveLassoOptions d;
  o.gamma = j.value("gamma", d.gamma);
  o.eps_w = j.value("eps_w", d.eps_w);
  o.max_outer = j.value("max_outer", d.max_outer);
  o.max_passes = j.value("max_passes", d.max_passes);
  o.tol = j.value("tol", d.tol);
  if (j.contains("initial")) o.initial = j.at("initial").get<SolverSettings>();
}
}  // namespace linear

namespace gbdt {
inline void to_json(json& j, const GbdtConfig& c) {
  j = json{{"rounds", c.rounds}, {"learning_rate", c.learning_rate}, {"max_depth", c.max_depth},
           {"lambda", c.lambda}, {"gamma", c.gamma},                 {"min_child_cover", c.min_child_cover}};
}
inline void from_json(const json& j, GbdtConfig& c) {
  const GbdtConfig d;
  c.rounds = j.value("rounds", d.rounds);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.max_depth = j.value("max_depth", d.max_depth);
  c.lambda = j.value("lambda", d.lambda);
  c.gamma = j.value("gamma", d.gamma);
  c.min_child_cover = j.value("min_child_cover", d.min_child_cover);
}
}  // namespace gbdt

namespace ebm {
inline void to_json(json& j, const EbmConfig& c) {
  j = json{{"rounds", c.rounds},
           {"learning_rate", c.learning_rate},
           {"max_leaves", c.max_leaves},
           {"n_pairs", c.n_pairs},
           {"max_bins", c.max_bins},
           {"max_pair_bins", c.max_pair_bins},
           {"validation_interval", c.validation_interval},
           {"patience", c.patience},
           {"pair_rounds", c.pair_rounds},
           {"pair_validation_interval", c.pair_validation_interval},
           {"pair_patience", c.pair_patience},
           {"min_samples_leaf", c.min_samples_leaf},
           {"min_hessian", c.min_hessian},
           {"tolerance", c.tolerance}};
}
inline void from_json(const json& j, EbmConfig& c) {
  const EbmConfig d;
  c.rounds = j.value("rounds", d.rounds);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.max_leaves = j.value("max_leaves", d.max_leaves);
  c.n_pairs = j.value("n_pairs", d.n_pairs);
  c.max_bins = j.value("max_bins", d.max_bins);
  c.max_pair_bins = j.value("max_pair_bins", d.max_pair_bins);
  c.validation_interval = j.value("validation_interval", d.validation_interval);
  c.patience = j.value("patience", d.patience);
  c.pair_rounds = j.value("pair_rounds", d.pair_rounds);
  c.pair_validation_interval = j.value("pair_validation_interval", d.pair_validation_interval);
  c.pair_patience = j.value("pair_patience", d.pair_patience);
  c.min_samples_leaf = j.value("min_samples_leaf", d.min_samples_leaf);
  c.min_hessian = j.value("min_hessian", d.min_hessian);
  c.tolerance = j.value("tolerance", d.tolerance);
}
}  // namespace ebm

namespace pltr {
inline void to_json(json& j, const PltrOptions& o) {
  j = json{{"lambda", o.lambda ? json(*o.lambda) : json("auto")},
           {"include_original", o.include_original},
           {"fit_pairs", o.fit_pairs},
           {"lasso", o.lasso}};
}
inline void from_json(const json& j, PltrOptions& o) {
  const PltrOptions d;
  o = d;
  if (j.contains("lambda")) {
    const auto& l = j.at("lambda");
    if (l.is_string()) {
      if (l.get<std::string>() != "auto") throw UsageError("pltr: lambda must be a number or \"auto\"");
      o.lambda.reset();
    } else {
      o.lambda = l.get<double>();
    }
  }
  o.include_original = j.value("include_original", d.include_original);
  o.fit_pairs = j.value("fit_pairs", d.fit_pairs);
  if (j.contains("lasso")) o.lasso = j.at("lasso").get<linear::AdaptiveLassoOptions>();
}
}  // namespace pltr

inline void to_json(json& j, const ModelConfigs& c) {
  j = json{{"lr", c.lr}, {"gbdt", c.gbdt}, {"ebm", c.ebm}, {"pltr", c.pltr}};
}
inline void from_json(const json& j, ModelConfigs& c) {
  c = ModelConfigs{};
  if (j.contains("lr")) c.lr = j.at("lr").get<linear::SolverSettings>();
  if (j.contains("gbdt")) c.gbdt = j.at("gbdt").get<gbdt::GbdtConfig>();
  if (j.contains("ebm")) c.ebm = j.at("ebm").get<ebm::EbmConfig>();
  if (j.contains("pltr")) c.pltr = j.at("pltr").get<pltr::PltrOptions>();
}

inline json config_of(const AnyModel& m) {
  return std::visit(
      [](const auto& model) -> json {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, gbdt::GbdtModel>)
          return json{{"rounds", model.trees.size()},   {"learning_rate", model.learning_rate},
                      {"max_depth", model.max_depth},   {"lambda", model.lambda},
                      {"gamma", model.gamma},           {"min_child_cover", model.min_child_cover}};
        else if constexpr (std::is_same_v<T, ebm::EbmModel>)
          return json(model.config);
        else if constexpr (std::is_same_v<T, pltr::PltrModel>)
          return json{{"lambda", model.lambda}, {"include_original", model.include_original}};
        else
          return json{{"standardize", model.standardization.has_value()}};
      },
      m);
}

// ---------------------------------------------------------------------------
// Model payloads

namespace serial {

inline json lr_payload(const linear::LinearModel& m) {
  json j{{"intercept", m.intercept}, {"coefficients", m.coefficients}, {"feature_names", m.feature_names}};
  j["standardization"] =
      m.standardization ? json{{"means", m.standardization->means}, {"stddevs", m.standardization->stddevs}} : json();
  return j;
}

inline linear::LinearModel lr_from(const json& j) {
  linear::LinearModel m;
  m.intercept = j.at("intercept").get<double>();
  m.coefficients = j.at("coefficients").get<std::vector<double>>();
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  if (m.coefficients.size() != m.feature_names.size()) throw DataError("model: coefficient count mismatch");
  const auto& s = j.at("standardization");
  if (!s.is_null()) {
    Standardization st{s.at("means").get<std::vector<double>>(), s.at("stddevs").get<std::vector<double>>()};
    if (st.means.size() != m.dim() || st.stddevs.size() != m.dim())
      throw DataError("model: standardization size mismatch");
    m.standardization = std::move(st);
  }
  return m;
}

inline json gbdt_payload(const gbdt::GbdtModel& m) {
  json trees = json::array();
  for (const auto& t : m.trees) {
    json nodes = json::array();
    for (const auto& n : t.nodes)
      nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.value, n.cover, n.gain}));
    trees.push_back(std::move(nodes));
  }
  return json{{"base_score", m.base_score},
              {"learning_rate", m.learning_rate},
              {"lambda", m.lambda},
              {"gamma", m.gamma},
              {"max_depth", m.max_depth},
              {"min_child_cover", m.min_child_cover},
              {"feature_names", m.feature_names},
              {"node_fields", {"feature", "threshold", "left", "right", "value", "cover", "gain"}},
              {"trees", std::move(trees)}};
}

inline gbdt::GbdtModel gbdt_from(const json& j) {
  gbdt::GbdtModel m;
  m.base_score = j.at("base_score").get<double>();
  m.learning_rate = j.at("learning_rate").get<double>();
  m.lambda = j.at("lambda").get<double>();
  m.gamma = j.at("gamma").get<double>();
  m.max_depth = j.at("max_depth").get<int>();
  m.min_child_cover = j.at("min_child_cover").get<double>();
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  for (const auto& t : j.at("trees")) {
    gbdt::Tree tree;
    for (const auto& n : t) {
      if (!n.is_array() || n.size() != 7) throw DataError("model: malformed tree node");
      tree.nodes.push_back({n[0].get<int>(), n[1].get<double>(), n[2].get<int>(), n[3].get<int>(),
                            n[4].get<double>(), n[5].get<double>(), n[6].get<double>()});
    }
    if (tree.nodes.empty()) throw DataError("model: empty tree");
    const int count = static_cast<int>(tree.nodes.size());
    for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
      const auto& n = tree.nodes[k];
      if (n.is_leaf()) continue;
      if (n.feature >= static_cast<int>(m.dim()) || n.left <= static_cast<int>(k) || n.right <= static_cast<int>(k) ||
          n.left >= count || n.right >= count)
        throw DataError("model: tree node index out of range");
    }
    m.trees.push_back(std::move(tree));
  }
  return m;
}

inline json ebm_payload(const ebm::EbmModel& m) {
  json bins = json::array(), shapes = json::array(), pairs = json::array();
  for (const auto& b : m.bins) bins.push_back(b.cuts);
  for (const auto& s : m.shapes)
    shapes.push_back(json{{"feature", s.feature}, {"scores", s.scores}, {"counts", s.train_counts}});
  for (const auto& p : m.pairs)
    pairs.push_back(json{{"first", p.first},
                         {"second", p.second},
                         {"first_cuts", p.first_bins.cuts},
                         {"second_cuts", p.second_bins.cuts},
                         {"scores", p.scores},
                         {"counts", p.train_counts}});
  return json{{"intercept", m.intercept}, {"feature_names", m.feature_names}, {"config", m.config},
              {"cycles_run", m.cycles_run}, {"bins", std::move(bins)},       {"shapes", std::move(shapes)},
              {"pairs", std::move(pairs)}};
}

inline ebm::EbmModel ebm_from(const json& j) {
  ebm::EbmModel m;
  m.intercept = j.at("intercept").get<double>();
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  m.config = j.at("config").get<ebm::EbmConfig>();
  m.cycles_run = j.at("cycles_run").get<int>();
  for (const auto& b : j.at("bins")) m.bins.push_back({b.get<std::vector<double>>()});
  if (m.bins.size() != m.dim()) throw DataError("model: bin definition count mismatch");
  for (const auto& s : j.at("shapes")) {
    ebm::ShapeFunction f{s.at("feature").get<std::size_t>(), s.at("scores").get<std::vector<double>>(),
                         s.at("counts").get<std::vector<std::uint64_t>>()};
    if (f.feature >= m.dim() || f.scores.size() != m.bins[f.feature].bins() || f.train_counts.size() != f.scores.size())
      throw DataError("model: shape function does not match its bins");
    m.shapes.push_back(std::move(f));
  }
  for (const auto& p : j.at("pairs")) {
    ebm::PairFunction f;
    f.first = p.at("first").get<std::size_t>();
    f.second = p.at("second").get<std::size_t>();
    f.first_bins.cuts = p.at("first_cuts").get<std::vector<double>>();
    f.second_bins.cuts = p.at("second_cuts").get<std::vector<double>>();
    f.scores = p.at("scores").get<std::vector<double>>();
    f.train_counts = p.at("counts").get<std::vector<std::uint64_t>>();
    if (f.first >= f.second || f.second >= m.dim() ||
        f.scores.size() != f.first_bins.bins() * f.second_bins.bins() || f.train_counts.size() != f.scores.size())
      throw DataError("model: pair function does not match its bins");
    m.pairs.push_back(std::move(f));
  }
  return m;
}

inline json pltr_payload(const pltr::PltrModel& m) {
  json stumps = json::array(), pairs = json::array();
  for (const auto& s : m.stumps) stumps.push_back(json{{"feature", s.feature}, {"threshold", s.threshold}, {"reduction", s.reduction}});
  for (const auto& p : m.pairs)
    pairs.push_back(json{{"root", p.root},
                         {"root_threshold", p.root_threshold},
                         {"second", p.second},
                         {"second_threshold", p.second_threshold}});
  return json{{"feature_names", m.feature_names}, {"include_original", m.include_original},
              {"lambda", m.lambda},               {"stumps", std::move(stumps)},
              {"pairs", std::move(pairs)},        {"linear", lr_payload(m.linear)},
              {"notes", m.notes}};
}

inline pltr::PltrModel pltr_from(const json& j) {
  pltr::PltrModel m;
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  m.include_original = j.at("include_original").get<bool>();
  m.lambda = j.at("lambda").get<double>();
  for (const auto& s : j.at("stumps"))
    m.stumps.push_back({s.at("feature").get<std::size_t>(), s.at("threshold").get<double>(),
                        s.at("reduction").get<double>()});
  for (const auto& p : j.at("pairs"))
    m.pairs.push_back({p.at("root").get<std::size_t>(), p.at("root_threshold").get<double>(),
                       p.at("second").get<std::size_t>(), p.at("second_threshold").get<double>()});
  m.linear = lr_from(j.at("linear"));
  m.notes = j.value("notes", std::vector<std::string>{});
  for (const auto& s : m.stumps)
    if (s.feature >= m.dim()) throw DataError("model: stump feature out of range");
  for (const auto& p : m.pairs)
    if (p.root >= m.dim() || p.second >= m.dim() || p.root == p.second)
      throw DataError("model: pair feature out of range");
  if (m.linear.dim() != m.extended_dim()) throw DataError("model: extended dimension mismatch");
  return m;
}

}  // namespace serial

// ---------------------------------------------------------------------------
// Envelope

struct ModelMetadata {
  std::string toolkit_version = kToolkitVersion;
  json config = json::object();
  std::string train_manifest_hash;
};

inline json model_to_json(const AnyModel& model, const ModelMetadata& meta = {}) {
  json payload = std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, linear::LinearModel>) return serial::lr_payload(m);
        else if constexpr (std::is_same_v<T, gbdt::GbdtModel>) return serial::gbdt_payload(m);
        else if constexpr (std::is_same_v<T, ebm::EbmModel>) return serial::ebm_payload(m);
        else return serial::pltr_payload(m);
      },
      model);
  json config = meta.config.empty() ? config_of(model) : meta.config;
  return json{{"format_version", kFormatVersion},
              {"model_kind", to_string(kind_of(model))},
              {"metadata",
               {{"toolkit_version", meta.toolkit_version},
                {"config", std::move(config)},
                {"train_manifest_hash", meta.train_manifest_hash}}},
              {"payload", std::move(payload)}};
}

inline AnyModel model_from_json(const json& j) {
  try {
    if (!j.is_object()) throw DataError("model: envelope must be a JSON object");
    const int version = j.at("format_version").get<int>();
    if (version != kFormatVersion)
      throw DataError("model: unsupported format_version " + std::to_string(version) + " (expected " +
                      std::to_string(kFormatVersion) + ")");
    const auto kind_name = j.at("model_kind").get<std::string>();
    ModelKind kind;
    try {
      kind = parse_model_kind(kind_name);
    } catch (const UsageError&) {
      throw DataError("model: unknown model_kind " + kind_name);
    }
    j.at("metadata").at("toolkit_version").get<std::string>();
    const auto& p = j.at("payload");
    switch (kind) {
      case ModelKind::kLr: return serial::lr_from(p);
      case ModelKind::kGbdt: return serial::gbdt_from(p);
      case ModelKind::kEbm: return serial::ebm_from(p);
      case ModelKind::kPltr: return serial::pltr_from(p);
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("model: schema violation: ") + e.what());
  }
  throw DataError("model: unreachable");
}

inline std::string dump(const json& j) { return j.dump(1, '\t') + "\n"; }

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out << text;
  if (!out) throw DataError("write failed: " + path);
}

inline json read_json(const std::string& path) {
  const std::string text = read_bytes(path);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw DataError(path + ": empty file");
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(path + ": corrupted JSON: " + e.what());
  }
}

inline void save_model(const AnyModel& model, const std::string& path, const ModelMetadata& meta = {}) {
  write_text(path, dump(model_to_json(model, meta)));
}

inline AnyModel load_model(const std::string& path) { return model_from_json(read_json(path)); }

}  // namespace glassbox
