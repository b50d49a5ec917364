/* Copyright 2026 The ChromaFlow Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <gtest/gtest.h>

#include <cmath>

#include "chromaflow/error.hpp"
#include "chromaflow/evaluate.hpp"
#include "chromaflow/rng.hpp"
#include "chromaflow/train.hpp"

namespace chromaflow {
namespace {

void expect_format_error(const std::string& text, const std::string& needle) {
  try {
    parse_manifest(text, 10);
    FAIL() << "expected FormatError containing '" << needle << "'";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(ManifestTest, ParsesRowsAndSkipsBlankLines) {
  const auto rows = parse_manifest(
      "image_path,true_class,target_class\r\na.ppm,1,2\r\n\nsub/b.png, 0 ,9\n", 10);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].image_path, "a.ppm");
  EXPECT_EQ(rows[1].image_path, "sub/b.png");
  EXPECT_EQ(rows[1].true_class, 0u);
  EXPECT_EQ(rows[1].target_class, 9u);
}

TEST(ManifestTest, ErrorsNameTheLine) {
  expect_format_error("path,label\n", "line 1");
  expect_format_error("image_path,true_class,target_class\na.ppm,1,2\nb.ppm,3,3\n",
                      "line 3");
  expect_format_error("image_path,true_class,target_class\na.ppm,x,2\n", "line 2");
  expect_format_error("image_path,true_class,target_class\na.ppm,1,10\n", "out of range");
  expect_format_error("image_path,true_class,target_class\na.ppm,1\n", "3 fields");
  expect_format_error("", "empty");
}

TEST(SettingsTest, CartesianProductOrder) {
  const auto s = expand_settings({AttackMode::kRgbAll, AttackMode::kLabChroma}, {0.0, 10.0},
                                 {false, true});
  ASSERT_EQ(s.size(), 8u);
  EXPECT_EQ(s[0].mode, AttackMode::kRgbAll);
  EXPECT_EQ(s[1].restricted, true);
  EXPECT_EQ(s[2].kappa, 10.0);
  EXPECT_EQ(s[4].mode, AttackMode::kLabChroma);
}

TEST(FormatDoubleTest, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(10.0), "10");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  const double v = 0.123456789012345678;
  EXPECT_EQ(std::stod(format_double(v)), v);
}

class EvaluateTest : public ::testing::Test {
 protected:
  void SetUp() override {
    Rng rng(101);
    model_ = Classifier::init(reference_architecture(), rng);
    for (std::size_t k = 0; k < 4; ++k) {
      const std::size_t label = k % 10;
      images_.push_back(make_synthetic_image(label, rng));
      rows_.push_back({"img" + std::to_string(k) + ".ppm", label, (label + 3) % 10});
    }
    settings_ = expand_settings({AttackMode::kYcbcrChroma, AttackMode::kRgbAll}, {0.0, 10.0},
                                {false});
    opts_.max_iters = 8;
    opts_.seed = 5;
  }
  Classifier model_;
  std::vector<Image> images_;
  std::vector<ManifestRow> rows_;
  std::vector<EvalSetting> settings_;
  EvalOptions opts_;
};

TEST_F(EvaluateTest, CellsAgreeWithPerImageRecords) {
  const EvaluationReport report = evaluate(rows_, images_, model_, settings_, opts_);
  const auto cells = report.cells();
  ASSERT_EQ(cells.size(), 4u);
  for (std::size_t s = 0; s < cells.size(); ++s) {
    std::size_t successes = 0;
    double sum = 0.0;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const EvalRecord& rec = report.record(s, r);
      EXPECT_EQ(rec.row, r);
      EXPECT_EQ(rec.setting, s);
      if (rec.success) {
        ++successes;
        sum += rec.metrics.one_minus_ssim;
      }
    }
    EXPECT_EQ(cells[s].successes, successes);
    EXPECT_LE(cells[s].successes, cells[s].attempts);
    EXPECT_EQ(cells[s].success_rate, static_cast<double>(successes) / 4.0);
    if (successes == 0) {
      EXPECT_TRUE(std::isnan(cells[s].mean_one_minus_ssim));
    } else {
      EXPECT_DOUBLE_EQ(cells[s].mean_one_minus_ssim, sum / static_cast<double>(successes));
    }
  }
}

TEST_F(EvaluateTest, OutputIsIndependentOfThreadCount) {
  const EvaluationReport one = evaluate(rows_, images_, model_, settings_, opts_);
  EvalOptions threaded = opts_;
  threaded.jobs = 3;
  const EvaluationReport three = evaluate(rows_, images_, model_, settings_, threaded);
  EXPECT_EQ(per_image_csv(one), per_image_csv(three));
  EXPECT_EQ(success_rates_csv(one), success_rates_csv(three));
}

TEST_F(EvaluateTest, CsvShapes) {
  const EvaluationReport report = evaluate(rows_, images_, model_, settings_, opts_);
  const std::string rates = success_rates_csv(report);
  EXPECT_EQ(std::count(rates.begin(), rates.end(), '\n'), 5);
  EXPECT_EQ(rates.substr(0, rates.find('\n')),
            "mode,kappa,restricted,attempts,successes,success_rate");
  const std::string per = per_image_csv(report);
  EXPECT_EQ(std::count(per.begin(), per.end(), '\n'), 1 + 16);
}

TEST_F(EvaluateTest, ExternalMetricsAreAveragedOverSuccesses) {
  ExternalMetrics ext;
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    ext[rows_[k].image_path.string()]["lpips"] = 0.1 * static_cast<double>(k + 1);
  }
  // A target equal to the model's prediction succeeds at iteration 0.
  std::vector<ManifestRow> rows = rows_;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rows[k].target_class = argmax(model_.predict(images_[k].pixels));
  }
  const EvaluationReport report = evaluate(rows, images_, model_, settings_, opts_, &ext);
  const auto cells = report.cells();
  EXPECT_NEAR(cells[0].mean_external.at("lpips"), 0.25, 1e-12);
  EXPECT_NE(distortion_csv(report).find("mean_lpips"), std::string::npos);
}

TEST_F(EvaluateTest, RejectsRowImageCountMismatch) {
  images_.pop_back();
  EXPECT_THROW(evaluate(rows_, images_, model_, settings_, opts_), UsageError);
}

}  // namespace
}  // namespace chromaflow
