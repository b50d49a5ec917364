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

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "chromaflow/train.hpp"

namespace chromaflow {
namespace {

std::array<double, 3> hsv_to_rgb(double hue_deg, double s, double v) {
  double h = std::fmod(hue_deg, 360.0);
  if (h < 0) h += 360.0;
  const double c = v * s;
  const double x = c * (1.0 - std::abs(std::fmod(h / 60.0, 2.0) - 1.0));
  const double m = v - c;
  std::array<double, 3> rgb{};
  switch (static_cast<int>(h / 60.0)) {
    case 0: rgb = {c, x, 0}; break;
    case 1: rgb = {x, c, 0}; break;
    case 2: rgb = {0, c, x}; break;
    case 3: rgb = {0, x, c}; break;
    case 4: rgb = {x, 0, c}; break;
    default: rgb = {c, 0, x}; break;
  }
  for (double& ch : rgb) ch += m;
  return rgb;
}

// Per-pixel offset shared by R, G and B: fine detail that lives in
// luminance only, as in natural photographs.
constexpr double kLumaGrain = 0.25;

double positive_mod(double a, double m) {
  const double r = std::fmod(a, m);
  return r < 0 ? r + m : r;
}

}  // namespace

Image make_synthetic_image(std::size_t label, Rng& rng, const SyntheticOptions& options) {
  if (options.num_classes == 0 || options.num_classes > kSyntheticPatterns) {
    throw UsageError("make_synthetic_image: num_classes must be in [1, " +
                     std::to_string(kSyntheticPatterns) + "]");
  }
  if (label >= options.num_classes) {
    throw UsageError("make_synthetic_image: label out of range");
  }
  const std::size_t H = options.height, W = options.width;
  const double fg_hue = rng.uniform(0.0, 360.0);
  const double bg_hue = fg_hue + rng.uniform(90.0, 270.0);
  const auto fg = hsv_to_rgb(fg_hue, rng.uniform(0.5, 1.0), rng.uniform(0.5, 1.0));
  const auto bg = hsv_to_rgb(bg_hue, rng.uniform(0.5, 1.0), rng.uniform(0.5, 1.0));
  const double period = rng.uniform(4.0, 8.0);
  const double half = period / 2;
  const double phase_i = rng.uniform(0.0, period);
  const double phase_j = rng.uniform(0.0, period);
  const double ci = rng.uniform(0.3, 0.7) * static_cast<double>(H);
  const double cj = rng.uniform(0.3, 0.7) * static_cast<double>(W);
  const double amplitude = rng.uniform(0.15, 0.3) * period;

  Image img(H, W, ColorSpace::kRgb);
  for (std::size_t i = 0; i < H; ++i) {
    for (std::size_t j = 0; j < W; ++j) {
      const double di = static_cast<double>(i) + phase_i;
      const double dj = static_cast<double>(j) + phase_j;
      bool on = false;
      switch (label) {
        case 0:
          on = positive_mod(di, period) < half;
          break;
        case 1:
          on = positive_mod(dj, period) < half;
          break;
        case 2:
          on = positive_mod(di + dj, period) < half;
          break;
        case 3:
          on = positive_mod(di - dj, period) < half;
          break;
        case 4:
          on = (positive_mod(di, period) < half) == (positive_mod(dj, period) < half);
          break;
        case 5:
          on = std::hypot(positive_mod(di, period) - half, positive_mod(dj, period) - half) <
               period * 0.3;
          break;
        case 6:
          on = positive_mod(di, period) < period * 0.3 || positive_mod(dj, period) < period * 0.3;
          break;
        case 7:
          on = (positive_mod(di + dj, period) < half) == (positive_mod(di - dj, period) < half);
          break;
        case 8:
          on = positive_mod(std::hypot(static_cast<double>(i) - ci, static_cast<double>(j) - cj),
                            period) < half;
          break;
        default:
          on = positive_mod(di + amplitude * std::sin(2.0 * std::numbers::pi * dj / (2.0 * period)),
                            period) < half;
          break;
      }
      const auto& color = on ? fg : bg;
      const double grain = rng.uniform(-kLumaGrain, kLumaGrain);
      for (std::size_t c = 0; c < 3; ++c) {
        const double v = color[c] + grain + rng.uniform(-0.01, 0.01);
        img.at(c, i, j) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return img;
}

std::vector<LabeledImage> make_synthetic_dataset(std::size_t per_class, Rng& rng,
                                                 const SyntheticOptions& options) {
  std::vector<LabeledImage> data;
  data.reserve(per_class * options.num_classes);
  for (std::size_t k = 0; k < per_class; ++k) {
    for (std::size_t label = 0; label < options.num_classes; ++label) {
      data.push_back({make_synthetic_image(label, rng, options), label});
    }
  }
  return data;
}

}  // namespace chromaflow
