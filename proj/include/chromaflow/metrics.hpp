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

#ifndef CHROMAFLOW_METRICS_HPP_
#define CHROMAFLOW_METRICS_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>

#include "chromaflow/colorspace.hpp"

namespace chromaflow {

// Which planes SSIM is computed on. kRgbMean averages the per-channel
// scores over R, G and B; kLuma scores the BT.601 luma plane only.
enum class SsimDomain { kRgbMean, kLuma };

struct SsimOptions {
  SsimDomain domain = SsimDomain::kRgbMean;
};

inline constexpr std::size_t kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;
inline constexpr double kMsSsimWeights[5] = {0.0448, 0.2856, 0.3001, 0.2363,
                                             0.1333};

// 11x11 Gaussian window (sigma 1.5), valid-region only, dynamic range 1.
double ssim(const Image& a, const Image& b, const SsimOptions& options = {});

struct MsSsimOptions {
  std::size_t scales = 0;  // 0: as many as the image allows, at most 5
  SsimDomain domain = SsimDomain::kRgbMean;
};

// Largest scale count (<= 5) whose coarsest level still fits the window.
std::size_t max_ms_ssim_scales(std::size_t height, std::size_t width);

// 2x2 average-pool pyramid; the first `scales` weights are renormalized to
// sum to 1.
double ms_ssim(const Image& a, const Image& b, const MsSsimOptions& options = {});

// Hasler-Suesstrunk colorfulness on [0,1] RGB:
//   sqrt(var(rg) + var(yb)) + 0.3 sqrt(mean(rg)^2 + mean(yb)^2)
// with rg = R - G, yb = (R + G)/2 - B and population variances.
double colorfulness(const Image& img);

struct LpNorms {
  std::size_t l0 = 0;  // pixel positions with any channel differing > 1e-6
  double l2 = 0.0;
  double linf = 0.0;
};

LpNorms lp_norms(const Image& a, const Image& b);

struct MetricReport {
  double ssim = 1.0;
  double ms_ssim = 1.0;
  double one_minus_ssim = 0.0;
  double one_minus_ms_ssim = 0.0;
  std::size_t l0 = 0;
  double l2 = 0.0;
  double linf = 0.0;
  double colorfulness_benign = 0.0;
  // Values computed outside this library (e.g. LPIPS), keyed by name.
  std::map<std::string, double> external;
};

MetricReport measure(const Image& benign, const Image& test,
                     const SsimOptions& options = {});

// Externally computed metrics: CSV with header "image_path,<name>,..." and
// one row per image. Returns image_path -> (name -> value).
using ExternalMetrics = std::map<std::string, std::map<std::string, double>>;
ExternalMetrics load_external_metrics(const std::filesystem::path& csv);

}  // namespace chromaflow

#endif  // CHROMAFLOW_METRICS_HPP_
