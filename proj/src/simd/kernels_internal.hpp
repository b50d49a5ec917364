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

#ifndef CHROMAFLOW_SRC_SIMD_KERNELS_INTERNAL_HPP_
#define CHROMAFLOW_SRC_SIMD_KERNELS_INTERNAL_HPP_

#include "chromaflow/simd/kernels.hpp"

namespace chromaflow::simd::detail {

// Forward coefficients for YCbCr, written in difference form:
//   Cb = 128 + 0.168736 (B - R) + 0.331264 (B - G)
//   Cr = 128 + 0.418688 (R - G) + 0.081312 (R - B)
// which expands to the usual 128 - 0.168736 R - 0.331264 G + 0.5 B rows but
// gives exactly 128 for any gray input.
inline constexpr float kYr = 0.299f, kYg = 0.587f, kYb = 0.114f;
inline constexpr float kCbR = 0.168736f, kCbG = 0.331264f;
inline constexpr float kCrG = 0.418688f, kCrB = 0.081312f;
// Inverse coefficients as published (not the exact matrix inverse).
inline constexpr float kRCr = 1.402f;
inline constexpr float kGCb = 0.34414f, kGCr = 0.71414f;
inline constexpr float kBCb = 1.772f;
inline constexpr float kOffset = 128.0f;
inline constexpr float kScale = 255.0f;

const KernelTable& avx2_table();
bool cpu_has_avx2();

}  // namespace chromaflow::simd::detail

#endif  // CHROMAFLOW_SRC_SIMD_KERNELS_INTERNAL_HPP_
