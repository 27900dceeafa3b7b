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

// Drives the built binary end to end through std::system.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "fixtures.hpp"
#include "glassbox/csv.hpp"
#include "glassbox/serialize.hpp"
#include "glassbox/synth.hpp"

namespace gb = glassbox;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(GLASSBOX_CLI) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// One prepared synthetic split shared by the suite.
class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new gb::testing::TempDir("cli");
    std::ofstream(file("prep.json")) << nlohmann::json(gb::synth::prep_config()).dump();
    ASSERT_EQ(run("synth --rows 1500 --features 8 --informative 3 --out " + file("raw.csv")), 0);
    ASSERT_EQ(run("prepare --input " + file("raw.csv") + " --config " + file("prep.json") + " --train-out " +
                  file("train.csv") + " --test-out " + file("test.csv") + " --manifest-out " + file("prep_manifest.json")),
              0);
    std::ofstream(file("quick.json")) << R"({"gbdt": {"rounds": 25}, "ebm": {"n_pairs": 1}})";
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static std::string file(const std::string& name) { return dir_->file(name); }

  static gb::testing::TempDir* dir_;
};

gb::testing::TempDir* Cli::dir_ = nullptr;

double sum_until_margin(const std::vector<gb::csv::Row>& rows, double& margin) {
  double total = 0;
  for (std::size_t c = 0; c < rows[0].size(); ++c) {
    const double v = std::stod(rows[1][c]);
    if (rows[0][c] == "margin") margin = v;
    else total += v;
  }
  return total;
}

}  // namespace

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("train --kind lr"), 1);
  EXPECT_EQ(run("train --kind svm --train " + file("train.csv") + " --model-out " + file("x.json")), 1);
  EXPECT_EQ(run("evaluate --model m.json --data d.csv --threshold 1.5"), 1);
  EXPECT_EQ(run("--version"), 0);
}

TEST_F(Cli, DataErrorsExitTwo) {
  EXPECT_EQ(run("evaluate --model " + file("nope.json") + " --data " + file("test.csv")), 2);
  std::ofstream(file("empty.json"));
  EXPECT_EQ(run("evaluate --model " + file("empty.json") + " --data " + file("test.csv")), 2);
  EXPECT_EQ(run("prepare --input " + file("missing.csv") + " --train-out a --test-out b"), 2);
}

TEST_F(Cli, NumericalErrorsExitThree) {
  std::ofstream(file("no_iter.json")) << R"({"lr": {"max_iter": 1, "tol": 1e-300}})";
  EXPECT_EQ(run("train --kind lr --train " + file("train.csv") + " --config " + file("no_iter.json") +
                " --model-out " + file("lr_bad.json")),
            3);
}

TEST_F(Cli, TrainEvaluateAndExplainSumToMargin) {
  for (const std::string kind : {"lr", "gbdt", "ebm", "pltr"}) {
    const auto model = file(kind + ".json");
    ASSERT_EQ(run("train --kind " + kind + " --train " + file("train.csv") + " --test " + file("test.csv") +
                  " --config " + file("quick.json") + " --model-out " + model + " --report-out " +
                  file(kind + "_report.json")),
              0)
        << kind;
    const auto report = gb::read_json(file(kind + "_report.json"));
    EXPECT_GT(report.at("auroc").get<double>(), 0.6) << kind;
    ASSERT_EQ(run("evaluate --model " + model + " --data " + file("test.csv") + " --out " + file(kind + "_eval.json") +
                  " --curves-out " + file(kind + "_curve")),
              0);
    EXPECT_EQ(gb::read_json(file(kind + "_eval.json")), report) << kind;
    EXPECT_GT(gb::csv::read_file(file(kind + "_curve_roc.csv")).size(), 2u);

    ASSERT_EQ(run("explain --model " + model + " --data " + file("test.csv") + " --row 7 --out " +
                  file(kind + "_explain.csv")),
              0);
    const auto rows = gb::csv::read_file(file(kind + "_explain.csv"));
    ASSERT_EQ(rows.size(), 2u);
    double margin = 0;
    const double total = sum_until_margin(rows, margin);
    EXPECT_NEAR(total, margin, 1e-9 * (1 + std::abs(margin))) << kind;
    const auto loaded = gb::load_model(model);
    const auto test = gb::read_dataset_csv(file("test.csv"));
    EXPECT_EQ(margin, gb::predict_margin(loaded, test.X.row(7))) << kind;
  }
  const auto gbdt_rows = gb::csv::read_file(file("gbdt_explain.csv"));
  EXPECT_EQ(gbdt_rows[0].front(), "phi0");
  EXPECT_EQ(gbdt_rows[0].size(), 8u + 2u);
  EXPECT_EQ(run("explain --model " + file("lr.json") + " --data " + file("test.csv") + " --row 999999"), 1);
}

TEST_F(Cli, RankReduceSweepsRefineAndShapes) {
  ASSERT_EQ(run("train --kind gbdt --train " + file("train.csv") + " --config " + file("quick.json") +
                " --model-out " + file("rank_gbdt.json")),
            0);
  ASSERT_EQ(run("rank --model " + file("rank_gbdt.json") + " --data " + file("train.csv") + " --out " +
                file("ranking.json")),
            0);
  const auto ranking = gb::read_json(file("ranking.json"));
  EXPECT_EQ(ranking.at("method"), "shap");
  EXPECT_EQ(ranking.at("features").size(), 8u);
  EXPECT_EQ(run("rank --model " + file("rank_gbdt.json") + " --data " + file("train.csv") + " --method gain --out " +
                file("gain.json")),
            0);

  ASSERT_EQ(run("reduce-train --train " + file("train.csv") + " --test " + file("test.csv") + " --ranking " +
                file("ranking.json") + " --k 3 --kind ebm --model-out " + file("ebm3.json") + " --report-out " +
                file("ebm3_report.json")),
            0);
  EXPECT_EQ(run("reduce-train --train " + file("train.csv") + " --test " + file("test.csv") + " --ranking " +
                file("ranking.json") + " --k 0 --kind ebm --model-out " + file("ebm0.json")),
            1);
  ASSERT_EQ(run("export-shape --model " + file("ebm3.json") + " --feature x00 --out " + file("shape.csv")), 0);
  EXPECT_EQ(gb::csv::read_file(file("shape.csv"))[0], (gb::csv::Row{"lower", "upper", "score", "count"}));
  EXPECT_EQ(run("export-shape --model " + file("ebm3.json") + " --feature nope"), 1);
  EXPECT_EQ(run("export-shape --model " + file("rank_gbdt.json") + " --feature x00"), 1);

  ASSERT_EQ(run("sweep-k --train " + file("train.csv") + " --test " + file("test.csv") + " --ranking " +
                file("ranking.json") + " --ks 1,2,3 --kinds lr --out " + file("sweep.json") + " --csv-out " +
                file("sweep.csv")),
            0);
  EXPECT_EQ(gb::read_json(file("sweep.json")).at("rows").size(), 3u);
  ASSERT_EQ(run("sweep-pairs --train " + file("train.csv") + " --test " + file("test.csv") + " --ranking " +
                file("ranking.json") + " --k 3 --pairs 0,1 --out " + file("pairs.json")),
            0);
  EXPECT_EQ(gb::read_json(file("pairs.json")).at("rows").size(), 2u);
  ASSERT_EQ(run("refine --train " + file("train.csv") + " --ranking " + file("ranking.json") +
                " --pool 6 --target 5 --protected 2 --out " + file("refined.json")),
            0);
  EXPECT_EQ(gb::read_json(file("refined.json")).at("ranking").at("features").size(), 5u);
}

TEST_F(Cli, RunWritesIdenticalManifests) {
  std::ofstream(file("exp.json")) << R"({
    "data": {"train_csv": ")" << file("train.csv") << R"(", "test_csv": ")" << file("test.csv") << R"("},
    "base_kinds": ["lr", "gbdt"], "k": 3, "reduced_kinds": ["ebm"],
    "models": {"gbdt": {"rounds": 20}}
  })";
  ASSERT_EQ(run("run --config " + file("exp.json") + " --out " + file("run_a")), 0);
  ASSERT_EQ(run("run --config " + file("exp.json") + " --out " + file("run_b")), 0);
  EXPECT_EQ(gb::read_bytes(file("run_a/manifest.json")), gb::read_bytes(file("run_b/manifest.json")));
  std::ofstream(file("bad_exp.json")) << R"({"data": {"csv": "/nonexistent/loans.csv"}})";
  EXPECT_EQ(run("run --config " + file("bad_exp.json") + " --out " + file("run_c")), 2);
}
