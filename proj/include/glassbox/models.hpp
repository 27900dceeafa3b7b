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

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "glassbox/ebm.hpp"
#include "glassbox/gbdt.hpp"
#include "glassbox/linear.hpp"
#include "glassbox/pltr.hpp"

namespace glassbox {

enum class ModelKind { kLr, kGbdt, kEbm, kPltr };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::kLr: return "lr";
    case ModelKind::kGbdt: return "gbdt";
    case ModelKind::kEbm: return "ebm";
    case ModelKind::kPltr: return "pltr";
  }
  return "?";
}

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "lr") return ModelKind::kLr;
  if (s == "gbdt") return ModelKind::kGbdt;
  if (s == "ebm") return ModelKind::kEbm;
  if (s == "pltr") return ModelKind::kPltr;
  throw UsageError("unknown model kind: " + std::string(s));
}

using AnyModel = std::variant<linear::LinearModel, gbdt::GbdtModel, ebm::EbmModel, pltr::PltrModel>;

inline ModelKind kind_of(const AnyModel& m) { return static_cast<ModelKind>(m.index()); }

inline double predict_margin(const AnyModel& m, std::span<const double> x) {
  return std::visit(
      [&](const auto& model) -> double {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, linear::LinearModel> || std::is_same_v<T, pltr::PltrModel>)
          return model.log_odds(x);
        else
          return model.predict_margin(x);
      },
      m);
}

inline std::vector<double> predict_proba(const AnyModel& m, const Matrix& X) {
  return std::visit([&](const auto& model) { return model.predict_proba(X); }, m);
}

inline const std::vector<std::string>& feature_names(const AnyModel& m) {
  return std::visit([](const auto& model) -> const std::vector<std::string>& { return model.feature_names; }, m);
}

// Hyperparameters for every trainable kind.
struct ModelConfigs {
  linear::SolverSettings lr = [] {
    linear::SolverSettings s;
    s.standardize = true;
    return s;
  }();
  gbdt::GbdtConfig gbdt;
  ebm::EbmConfig ebm;
  pltr::PltrOptions pltr;
};

inline AnyModel train_model(ModelKind kind, const Dataset& train, const ModelConfigs& cfg) {
  switch (kind) {
    case ModelKind::kLr: return linear::fit_logistic(train, cfg.lr);
    case ModelKind::kGbdt: return gbdt::fit_gbdt(train, cfg.gbdt);
    case ModelKind::kEbm: return ebm::fit_ebm(train, cfg.ebm);
    case ModelKind::kPltr: return pltr::fit_pltr(train, cfg.pltr);
  }
  throw UsageError("unknown model kind");
}

}  // namespace glassbox
