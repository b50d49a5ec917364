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

#include "kernels_internal.hpp"

namespace chromaflow::simd {
namespace {

using namespace detail;

void axpy_scalar(float a, const float* x, float* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

float dot_scalar(const float* x, const float* y, std::size_t n) {
  float acc = 0.0f;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void rgb_to_ycbcr_scalar(const float* r, const float* g, const float* b,
                         float* y, float* cb, float* cr, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const float R = r[i] * kScale;
    const float G = g[i] * kScale;
    const float B = b[i] * kScale;
    y[i] = kYr * R + kYg * G + kYb * B;
    cb[i] = kOffset + kCbR * (B - R) + kCbG * (B - G);
    cr[i] = kOffset + kCrG * (R - G) + kCrB * (R - B);
  }
}

void ycbcr_to_rgb_scalar(const float* y, const float* cb, const float* cr,
                         float* r, float* g, float* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const float dcb = cb[i] - kOffset;
    const float dcr = cr[i] - kOffset;
    r[i] = (y[i] + kRCr * dcr) / kScale;
    g[i] = (y[i] - kGCb * dcb - kGCr * dcr) / kScale;
    b[i] = (y[i] + kBCb * dcb) / kScale;
  }
}

constexpr KernelTable kScalarTable{Isa::kScalar, axpy_scalar, dot_scalar,
                                   rgb_to_ycbcr_scalar, ycbcr_to_rgb_scalar};

}  // namespace

const KernelTable& scalar_kernels() { return kScalarTable; }

}  // namespace chromaflow::simd
