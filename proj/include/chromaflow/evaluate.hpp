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

#ifndef CHROMAFLOW_EVALUATE_HPP_
#define CHROMAFLOW_EVALUATE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "chromaflow/attack.hpp"
#include "chromaflow/metrics.hpp"

namespace chromaflow {

struct ManifestRow {
  std::filesystem::path image_path;  // as written in the manifest
  std::size_t true_class = 0;
  std::size_t target_class = 0;
};

// CSV with header "image_path,true_class,target_class". Rows must have
// target != true and both below num_classes; violations are FormatErrors
// naming the 1-based line.
std::vector<ManifestRow> parse_manifest(const std::string& text, std::size_t num_classes);
std::vector<ManifestRow> read_manifest(const std::filesystem::path& path,
                                       std::size_t num_classes);

struct EvalSetting {
  AttackMode mode = AttackMode::kYcbcrChroma;
  double kappa = 0.0;
  bool restricted = false;
};

// Cartesian product in mode-major, then kappa, then restricted order.
std::vector<EvalSetting> expand_settings(const std::vector<AttackMode>& modes,
                                         const std::vector<double>& kappas,
                                         const std::vector<bool>& restricted);

struct EvalOptions {
  std::uint64_t seed = 0;
  std::size_t max_iters = 500;
  double lr = 0.01;
  std::size_t jobs = 1;
  bool keep_adversarial = false;
};

struct EvalRecord {
  std::size_t row = 0;
  std::size_t setting = 0;
  bool success = false;
  std::size_t iterations = 0;
  double final_loss = 0.0;
  MetricReport metrics;
  Image adversarial;  // only with keep_adversarial
};

struct EvalCell {
  EvalSetting setting;
  std::size_t attempts = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  // Means over successful attacks only; NaN when there are none.
  double mean_one_minus_ssim = 0.0;
  double mean_one_minus_ms_ssim = 0.0;
  double mean_l0 = 0.0;
  double mean_l2 = 0.0;
  double mean_linf = 0.0;
  std::map<std::string, double> mean_external;
};

struct EvaluationReport {
  std::vector<ManifestRow> rows;
  std::vector<EvalSetting> settings;
  // records[setting * rows.size() + row]
  std::vector<EvalRecord> records;

  const EvalRecord& record(std::size_t setting, std::size_t row) const {
    return records[setting * rows.size() + row];
  }
  std::vector<EvalCell> cells() const;
};

// Attacks every (row, setting) pair. Row r uses derive_seed(seed, r) for its
// flow initialization in every setting. Rows are distributed over `jobs`
// threads; the report is ordered by setting then row regardless.
EvaluationReport evaluate(const std::vector<ManifestRow>& rows, const std::vector<Image>& images,
                          const Classifier& model, const std::vector<EvalSetting>& settings,
                          const EvalOptions& options,
                          const ExternalMetrics* external = nullptr);

// Report files written by write_report.
inline constexpr const char* kPerImageCsv = "per_image.csv";
inline constexpr const char* kSuccessRatesCsv = "success_rates.csv";
inline constexpr const char* kDistortionCsv = "distortion.csv";
inline constexpr const char* kSummaryTxt = "summary.txt";

std::string per_image_csv(const EvaluationReport& report);
std::string success_rates_csv(const EvaluationReport& report);
std::string distortion_csv(const EvaluationReport& report);
std::string summary_text(const EvaluationReport& report);
void write_report(const EvaluationReport& report, const std::filesystem::path& out_dir);

// Shortest round-trip text for a double ("nan" for NaN).
std::string format_double(double v);

}  // namespace chromaflow

#endif  // CHROMAFLOW_EVALUATE_HPP_
