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

// glassbox: command-line front end. Exit codes: 0 ok, 1 usage, 2 data,
// 3 numerical.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "glassbox/pipeline.hpp"

namespace gb = glassbox;
using nlohmann::json;

namespace {

gb::ModelConfigs read_model_configs(const std::string& path) {
  if (path.empty()) return {};
  const json j = gb::read_json(path);
  try {
    return j.contains("models") ? j.at("models").get<gb::ModelConfigs>() : j.get<gb::ModelConfigs>();
  } catch (const json::exception& e) {
    throw gb::UsageError(path + ": " + e.what());
  }
}

gb::RankedFeatures read_ranking(const std::string& path) {
  const json j = gb::read_json(path);
  try {
    return (j.contains("ranking") ? j.at("ranking") : j).get<gb::RankedFeatures>();
  } catch (const json::exception& e) {
    throw gb::DataError(path + ": " + e.what());
  }
}

void write_rows(const std::string& path, const std::vector<gb::csv::Row>& rows) {
  if (path.empty() || path == "-") {
    for (const auto& r : rows) gb::csv::write_row(std::cout, r);
  } else {
    gb::csv::write_file(path, rows);
  }
}

void write_json_out(const std::string& path, const json& j) {
  if (path.empty() || path == "-") std::cout << gb::dump(j);
  else gb::write_text(path, gb::dump(j));
}

std::vector<std::size_t> parse_list(const std::string& text) {
  // "1,2,5" or "0..9" or a mix: "1..5,10,20"
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dots = item.find("..");
    try {
      if (dots == std::string::npos) {
        out.push_back(std::stoul(item));
      } else {
        const auto lo = std::stoul(item.substr(0, dots)), hi = std::stoul(item.substr(dots + 2));
        if (lo > hi) throw gb::UsageError("bad range " + item);
        for (auto v = lo; v <= hi; ++v) out.push_back(v);
      }
    } catch (const std::logic_error&) {
      throw gb::UsageError("bad list element '" + item + "'");
    }
  }
  if (out.empty()) throw gb::UsageError("empty list");
  return out;
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

template <typename T>
void check_threshold(T t) {
  if (!(t > 0 && t < 1)) throw gb::UsageError("--threshold must lie in (0, 1)");
}

std::vector<gb::csv::Row> explain_row(const gb::AnyModel& model, std::span<const double> x) {
  gb::csv::Row header, values;
  auto add = [&](std::string name, double v) {
    header.push_back(std::move(name));
    values.push_back(gb::format_double(v));
  };
  const double margin = gb::predict_margin(model, x);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, gb::gbdt::GbdtModel>) {
          const auto a = gb::shap::tree_shap(m, x);
          add("phi0", a.base_value);
          for (std::size_t j = 0; j < m.dim(); ++j) add(m.feature_names[j], a.values[j]);
        } else if constexpr (std::is_same_v<T, gb::ebm::EbmModel>) {
          add("intercept", m.intercept);
          const auto terms = m.term_contributions(x);
          for (std::size_t t = 0; t < terms.size(); ++t) add(m.term_name(t), terms[t]);
        } else if constexpr (std::is_same_v<T, gb::linear::LinearModel>) {
          add("intercept", m.intercept);
          const auto c = m.contributions(x);
          for (std::size_t j = 0; j < c.size(); ++j) add(m.feature_names[j], c[j]);
        } else {
          add("intercept", m.linear.intercept);
          const auto ext = gb::pltr::extended_row(x, m.stumps, m.pairs, m.include_original);
          const auto c = m.linear.contributions(ext);
          for (std::size_t j = 0; j < c.size(); ++j) add(m.linear.feature_names[j], c[j]);
        }
      },
      model);
  add("margin", margin);
  return {header, values};
}

int dispatch(int argc, char** argv) {
  CLI::App app{"glassbox: interpretable credit-scoring toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gb::kToolkitVersion);

  // synth
  auto* synth = app.add_subcommand("synth", "generate the synthetic preset as a raw CSV");
  std::string synth_config, synth_out;
  gb::synth::SynthConfig sc;
  synth->add_option("--config", synth_config, "synthetic generator config (JSON)");
  synth->add_option("--out", synth_out, "output CSV")->required();
  auto* o_rows = synth->add_option("--rows", sc.rows, "total rows");
  auto* o_features = synth->add_option("--features", sc.features, "feature count");
  auto* o_inf = synth->add_option("--informative", sc.informative, "informative feature count");
  auto* o_xor = synth->add_option("--xor", sc.xor_strength, "planted interaction strength");
  auto* o_red = synth->add_option("--redundant", sc.redundant, "planted redundant copies");
  auto* o_seed = synth->add_option("--seed", sc.seed, "generator seed");
  auto* o_lin = synth->add_flag("--linear", sc.linear_effects, "linear effects only");

  // prepare
  auto* prepare = app.add_subcommand("prepare", "ingest a raw CSV and write prepared train/test CSVs");
  std::string prep_in, prep_config, prep_train, prep_test, prep_manifest;
  prepare->add_option("--input", prep_in, "raw CSV")->required();
  prepare->add_option("--config", prep_config, "preparation config (JSON)");
  prepare->add_option("--train-out", prep_train, "prepared train CSV")->required();
  prepare->add_option("--test-out", prep_test, "prepared test CSV")->required();
  prepare->add_option("--manifest-out", prep_manifest, "preparation manifest (JSON)");

  // train
  auto* train = app.add_subcommand("train", "train a model on a prepared dataset");
  std::string train_kind, train_data, train_test, train_config, train_out, train_report;
  double train_threshold = 0.5;
  train->add_option("--kind", train_kind, "lr | gbdt | ebm | pltr")->required();
  train->add_option("--train", train_data, "prepared train CSV")->required();
  train->add_option("--test", train_test, "prepared test CSV (for --report-out)");
  train->add_option("--config", train_config, "model configs (JSON)");
  train->add_option("--model-out", train_out, "model file")->required();
  train->add_option("--report-out", train_report, "metric report (JSON)");
  train->add_option("--threshold", train_threshold, "classification threshold");

  // rank
  auto* rank = app.add_subcommand("rank", "rank features by model importance");
  std::string rank_model, rank_data, rank_method, rank_out;
  rank->add_option("--model", rank_model, "model file")->required();
  rank->add_option("--data", rank_data, "prepared CSV used for importance")->required();
  rank->add_option("--method", rank_method, "coef | shap | ebm | gain | cover | frequency (default per model kind)");
  rank->add_option("--out", rank_out, "ranking (JSON)")->required();

  // reduce-train
  auto* reduce = app.add_subcommand("reduce-train", "train on the top-k ranked features");
  std::string red_train, red_test, red_ranking, red_kind, red_config, red_model, red_report;
  std::size_t red_k = 10;
  double red_threshold = 0.5;
  reduce->add_option("--train", red_train, "prepared train CSV")->required();
  reduce->add_option("--test", red_test, "prepared test CSV")->required();
  reduce->add_option("--ranking", red_ranking, "ranking (JSON)")->required();
  reduce->add_option("--k", red_k, "feature count")->required();
  reduce->add_option("--kind", red_kind, "lr | gbdt | ebm | pltr")->required();
  reduce->add_option("--config", red_config, "model configs (JSON)");
  reduce->add_option("--model-out", red_model, "model file")->required();
  reduce->add_option("--report-out", red_report, "metric report (JSON)");
  reduce->add_option("--threshold", red_threshold, "classification threshold");

  // sweep-k
  auto* sweepk = app.add_subcommand("sweep-k", "metrics versus number of top features");
  std::string sk_train, sk_test, sk_ranking, sk_ks, sk_kinds = "ebm", sk_config, sk_out, sk_csv;
  double sk_eps = gb::pipeline::kPlateauEpsilon, sk_threshold = 0.5;
  sweepk->add_option("--train", sk_train, "prepared train CSV")->required();
  sweepk->add_option("--test", sk_test, "prepared test CSV")->required();
  sweepk->add_option("--ranking", sk_ranking, "ranking (JSON)")->required();
  sweepk->add_option("--ks", sk_ks, "ascending list, e.g. 1..12,15,20")->required();
  sweepk->add_option("--kinds", sk_kinds, "comma-separated model kinds");
  sweepk->add_option("--epsilon", sk_eps, "plateau AUPRC gain threshold");
  sweepk->add_option("--config", sk_config, "model configs (JSON)");
  sweepk->add_option("--out", sk_out, "report (JSON)")->required();
  sweepk->add_option("--csv-out", sk_csv, "report (CSV)");
  sweepk->add_option("--threshold", sk_threshold, "classification threshold");

  // sweep-pairs
  auto* sweepp = app.add_subcommand("sweep-pairs", "EBM metrics versus number of pairwise terms");
  std::string sp_train, sp_test, sp_ranking, sp_pairs = "0..9", sp_config, sp_out, sp_csv;
  std::size_t sp_k = 10;
  double sp_threshold = 0.5;
  sweepp->add_option("--train", sp_train, "prepared train CSV")->required();
  sweepp->add_option("--test", sp_test, "prepared test CSV")->required();
  sweepp->add_option("--ranking", sp_ranking, "ranking (JSON)")->required();
  sweepp->add_option("--k", sp_k, "feature count");
  sweepp->add_option("--pairs", sp_pairs, "pair counts, e.g. 0..9");
  sweepp->add_option("--config", sp_config, "model configs (JSON)");
  sweepp->add_option("--out", sp_out, "report (JSON)")->required();
  sweepp->add_option("--csv-out", sp_csv, "report (CSV)");
  sweepp->add_option("--threshold", sp_threshold, "classification threshold");

  // refine
  auto* refine = app.add_subcommand("refine", "drop highly correlated lower-ranked features");
  std::string rf_train, rf_ranking, rf_out;
  gb::pipeline::RefinementConfig rc;
  refine->add_option("--train", rf_train, "prepared train CSV")->required();
  refine->add_option("--ranking", rf_ranking, "ranking (JSON)")->required();
  refine->add_option("--pool", rc.pool, "candidate pool size");
  refine->add_option("--target", rc.target, "output size");
  refine->add_option("--protected", rc.protected_top, "never-dropped top features");
  refine->add_option("--tau", rc.threshold, "absolute correlation threshold");
  refine->add_option("--out", rf_out, "refined ranking (JSON)")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "score a model on a prepared dataset");
  std::string ev_model, ev_data, ev_out, ev_curves;
  double ev_threshold = 0.5;
  evaluate->add_option("--model", ev_model, "model file")->required();
  evaluate->add_option("--data", ev_data, "prepared CSV")->required();
  evaluate->add_option("--out", ev_out, "metric report (JSON, default stdout)");
  evaluate->add_option("--curves-out", ev_curves, "prefix for ROC / PR curve CSVs");
  evaluate->add_option("--threshold", ev_threshold, "classification threshold");

  // explain
  auto* explain = app.add_subcommand("explain", "per-row attributions or term contributions");
  std::string ex_model, ex_data, ex_out;
  std::size_t ex_row = 0;
  explain->add_option("--model", ex_model, "model file")->required();
  explain->add_option("--data", ex_data, "prepared CSV")->required();
  explain->add_option("--row", ex_row, "0-based data row")->required();
  explain->add_option("--out", ex_out, "CSV (default stdout)");

  // export-shape
  auto* shape = app.add_subcommand("export-shape", "write an EBM shape function or pair grid as CSV");
  std::string sh_model, sh_feature, sh_pair, sh_out;
  shape->add_option("--model", sh_model, "EBM model file")->required();
  auto* o_feat = shape->add_option("--feature", sh_feature, "feature name");
  auto* o_pair = shape->add_option("--pair", sh_pair, "feature pair 'a,b'");
  o_feat->excludes(o_pair);
  shape->add_option("--out", sh_out, "CSV (default stdout)");

  // run
  auto* run = app.add_subcommand("run", "run the full experiment pipeline");
  std::string run_config, run_out;
  run->add_option("--config", run_config, "experiment config (JSON)")->required();
  run->add_option("--out", run_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "glassbox: " << e.what() << "\n";
    return 1;
  }

  if (*synth) {
    gb::synth::SynthConfig base;
    if (!synth_config.empty()) {
      try {
        base = gb::read_json(synth_config).get<gb::synth::SynthConfig>();
      } catch (const json::exception& e) {
        throw gb::UsageError(synth_config + ": " + e.what());
      }
    }
    if (o_rows->count()) base.rows = sc.rows;
    if (o_features->count()) base.features = sc.features;
    if (o_inf->count()) base.informative = sc.informative;
    if (o_xor->count()) base.xor_strength = sc.xor_strength;
    if (o_red->count()) base.redundant = sc.redundant;
    if (o_seed->count()) base.seed = sc.seed;
    if (o_lin->count()) base.linear_effects = sc.linear_effects;
    const auto data = gb::synth::generate(base);
    gb::csv::write_file(synth_out, gb::synth::to_csv_rows(data, gb::synth::prep_config()));
    return 0;
  }
  if (*prepare) {
    gb::PrepConfig pc;
    if (!prep_config.empty()) {
      try {
        pc = gb::read_json(prep_config).get<gb::PrepConfig>();
      } catch (const json::exception& e) {
        throw gb::UsageError(prep_config + ": " + e.what());
      }
    }
    const auto data = gb::prepare_csv(prep_in, pc);
    gb::write_dataset_csv(prep_train, data.train);
    gb::write_dataset_csv(prep_test, data.test);
    if (!prep_manifest.empty()) gb::write_text(prep_manifest, gb::dump(json(data.manifest)));
    for (const auto& w : data.manifest.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
  }
  if (*train) {
    check_threshold(train_threshold);
    const auto kind = gb::parse_model_kind(train_kind);
    const auto cfgs = read_model_configs(train_config);
    const auto data = gb::read_dataset_csv(train_data);
    const auto model = gb::train_model(kind, data, cfgs);
    gb::ModelMetadata meta;
    meta.train_manifest_hash = gb::sha256_file(train_data);
    gb::save_model(model, train_out, meta);
    if (!train_report.empty()) {
      const auto& eval = train_test.empty() ? data : gb::read_dataset_csv(train_test);
      write_json_out(train_report, gb::metrics::evaluate(gb::predict_proba(model, eval.X), eval.y, train_threshold));
    }
    return 0;
  }
  if (*rank) {
    const auto model = gb::load_model(rank_model);
    const auto data = gb::read_dataset_csv(rank_data);
    if (gb::feature_names(model) != data.feature_names) throw gb::DataError("rank: data columns do not match model");
    gb::RankedFeatures ranked;
    if (rank_method == "gain" || rank_method == "cover" || rank_method == "frequency") {
      const auto* g = std::get_if<gb::gbdt::GbdtModel>(&model);
      if (!g) throw gb::UsageError("rank: " + rank_method + " importance requires a gbdt model");
      ranked = gb::rank_by_score(g->feature_names,
                                 gb::gbdt::importance_native(*g, gb::gbdt::parse_importance_kind(rank_method)),
                                 rank_method, "gbdt");
    } else {
      const auto method = rank_method.empty() ? gb::pipeline::default_rank_method(gb::kind_of(model))
                                              : gb::pipeline::parse_rank_method(rank_method);
      ranked = gb::pipeline::step2_rank(model, data, method);
    }
    write_json_out(rank_out, ranked);
    return 0;
  }
  if (*reduce) {
    check_threshold(red_threshold);
    const auto r = gb::pipeline::step3_train_reduced(gb::read_dataset_csv(red_train), gb::read_dataset_csv(red_test),
                                                     read_ranking(red_ranking), red_k, gb::parse_model_kind(red_kind),
                                                     read_model_configs(red_config), red_threshold);
    gb::save_model(r.model, red_model);
    if (!red_report.empty()) write_json_out(red_report, {{"train", r.train}, {"test", r.test}});
    return 0;
  }
  if (*sweepk) {
    check_threshold(sk_threshold);
    std::vector<gb::ModelKind> kinds;
    for (const auto& k : split_names(sk_kinds)) kinds.push_back(gb::parse_model_kind(k));
    const auto report = gb::pipeline::sweep_k(gb::read_dataset_csv(sk_train), gb::read_dataset_csv(sk_test),
                                              read_ranking(sk_ranking), parse_list(sk_ks), kinds,
                                              read_model_configs(sk_config), sk_eps, sk_threshold);
    write_json_out(sk_out, report);
    if (!sk_csv.empty()) gb::csv::write_file(sk_csv, gb::pipeline::report_csv(report));
    return 0;
  }
  if (*sweepp) {
    check_threshold(sp_threshold);
    const auto report = gb::pipeline::sweep_interactions(gb::read_dataset_csv(sp_train), gb::read_dataset_csv(sp_test),
                                                         read_ranking(sp_ranking), sp_k, parse_list(sp_pairs),
                                                         read_model_configs(sp_config), sp_threshold);
    write_json_out(sp_out, report);
    if (!sp_csv.empty()) gb::csv::write_file(sp_csv, gb::pipeline::report_csv(report));
    return 0;
  }
  if (*refine) {
    const auto r = gb::pipeline::refine_correlation(gb::read_dataset_csv(rf_train), read_ranking(rf_ranking), rc);
    json dropped = json::array();
    for (const auto& d : r.dropped) dropped.push_back({{"name", d.name}, {"kept", d.kept}, {"correlation", d.correlation}});
    write_json_out(rf_out, {{"ranking", r.features}, {"dropped", dropped}, {"diagnostics", r.diagnostics}, {"config", rc}});
    for (const auto& d : r.diagnostics) std::cerr << "note: " << d << "\n";
    return 0;
  }
  if (*evaluate) {
    check_threshold(ev_threshold);
    const auto model = gb::load_model(ev_model);
    const auto data = gb::read_dataset_csv(ev_data);
    if (gb::feature_names(model) != data.feature_names) throw gb::DataError("evaluate: data columns do not match model");
    const auto probs = gb::predict_proba(model, data.X);
    write_json_out(ev_out, gb::metrics::evaluate(probs, data.y, ev_threshold));
    if (!ev_curves.empty()) {
      std::vector<gb::csv::Row> roc{{"fpr", "tpr"}}, pr{{"recall", "precision"}};
      for (const auto& p : gb::metrics::roc_curve(probs, data.y)) roc.push_back({gb::format_double(p.x), gb::format_double(p.y)});
      for (const auto& p : gb::metrics::pr_curve(probs, data.y)) pr.push_back({gb::format_double(p.x), gb::format_double(p.y)});
      gb::csv::write_file(ev_curves + "_roc.csv", roc);
      gb::csv::write_file(ev_curves + "_pr.csv", pr);
    }
    return 0;
  }
  if (*explain) {
    const auto model = gb::load_model(ex_model);
    const auto data = gb::read_dataset_csv(ex_data);
    if (gb::feature_names(model) != data.feature_names) throw gb::DataError("explain: data columns do not match model");
    if (ex_row >= data.rows()) throw gb::UsageError("explain: --row out of range");
    write_rows(ex_out, explain_row(model, data.X.row(ex_row)));
    return 0;
  }
  if (*shape) {
    const auto model = gb::load_model(sh_model);
    const auto* m = std::get_if<gb::ebm::EbmModel>(&model);
    if (!m) throw gb::UsageError("export-shape: model is not an ebm");
    if (!sh_pair.empty()) {
      const auto names = split_names(sh_pair);
      if (names.size() != 2) throw gb::UsageError("export-shape: --pair needs 'a,b'");
      auto index = [&](const std::string& n) {
        for (std::size_t j = 0; j < m->dim(); ++j)
          if (m->feature_names[j] == n) return j;
        throw gb::UsageError("export-shape: unknown feature '" + n + "'");
      };
      write_rows(sh_out, gb::ebm::export_pair(*m, index(names[0]), index(names[1])));
    } else {
      if (sh_feature.empty()) throw gb::UsageError("export-shape: need --feature or --pair");
      write_rows(sh_out, gb::ebm::export_shape(*m, sh_feature));
    }
    return 0;
  }
  if (*run) {
    const auto config = gb::pipeline::parse_experiment(gb::read_json(run_config));
    const auto r = gb::pipeline::run_full(config, run_out);
    std::cout << r.manifest_hash << "  " << r.manifest_path.string() << "\n";
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const gb::Error& e) {
    std::cerr << "glassbox: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "glassbox: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "glassbox: " << e.what() << "\n";
    return 2;
  }
}
