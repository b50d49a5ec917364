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

// Compiled with -mavx2 -mfma. Nothing here may run before cpu_has_avx2()
// has been checked.

#include <immintrin.h>

#include "kernels_internal.hpp"

namespace chromaflow::simd::detail {
namespace {

void axpy_avx2(float a, const float* x, float* y, std::size_t n) {
  const __m256 va = _mm256_set1_ps(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 vx = _mm256_loadu_ps(x + i);
    const __m256 vy = _mm256_loadu_ps(y + i);
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, vx, vy));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

float dot_avx2(const float* x, const float* y, std::size_t n) {
  __m256 acc0 = _mm256_setzero_ps();
  __m256 acc1 = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), acc0);
    acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i + 8),
                           _mm256_loadu_ps(y + i + 8), acc1);
  }
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), acc0);
  }
  const __m256 acc = _mm256_add_ps(acc0, acc1);
  __m128 lo = _mm256_castps256_ps128(acc);
  const __m128 hi = _mm256_extractf128_ps(acc, 1);
  lo = _mm_add_ps(lo, hi);
  lo = _mm_add_ps(lo, _mm_movehl_ps(lo, lo));
  lo = _mm_add_ss(lo, _mm_shuffle_ps(lo, lo, 0x55));
  float sum = _mm_cvtss_f32(lo);
  for (; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

// The color kernels use plain mul/add in the scalar evaluation order so the
// results match the reference bit for bit.
void rgb_to_ycbcr_avx2(const float* r, const float* g, const float* b,
                       float* y, float* cb, float* cr, std::size_t n) {
  const __m256 scale = _mm256_set1_ps(kScale);
  const __m256 off = _mm256_set1_ps(kOffset);
  const __m256 yr = _mm256_set1_ps(kYr), yg = _mm256_set1_ps(kYg),
               yb = _mm256_set1_ps(kYb);
  const __m256 cbr = _mm256_set1_ps(kCbR), cbg = _mm256_set1_ps(kCbG);
  const __m256 crg = _mm256_set1_ps(kCrG), crb = _mm256_set1_ps(kCrB);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 R = _mm256_mul_ps(_mm256_loadu_ps(r + i), scale);
    const __m256 G = _mm256_mul_ps(_mm256_loadu_ps(g + i), scale);
    const __m256 B = _mm256_mul_ps(_mm256_loadu_ps(b + i), scale);
    __m256 vy = _mm256_add_ps(_mm256_mul_ps(yr, R), _mm256_mul_ps(yg, G));
    vy = _mm256_add_ps(vy, _mm256_mul_ps(yb, B));
    __m256 vcb = _mm256_add_ps(off, _mm256_mul_ps(cbr, _mm256_sub_ps(B, R)));
    vcb = _mm256_add_ps(vcb, _mm256_mul_ps(cbg, _mm256_sub_ps(B, G)));
    __m256 vcr = _mm256_add_ps(off, _mm256_mul_ps(crg, _mm256_sub_ps(R, G)));
    vcr = _mm256_add_ps(vcr, _mm256_mul_ps(crb, _mm256_sub_ps(R, B)));
    _mm256_storeu_ps(y + i, vy);
    _mm256_storeu_ps(cb + i, vcb);
    _mm256_storeu_ps(cr + i, vcr);
  }
  if (i < n) {
    scalar_kernels().rgb_to_ycbcr(r + i, g + i, b + i, y + i, cb + i, cr + i,
                                  n - i);
  }
}

void ycbcr_to_rgb_avx2(const float* y, const float* cb, const float* cr,
                       float* r, float* g, float* b, std::size_t n) {
  const __m256 scale = _mm256_set1_ps(kScale);
  const __m256 off = _mm256_set1_ps(kOffset);
  const __m256 rcr = _mm256_set1_ps(kRCr);
  const __m256 gcb = _mm256_set1_ps(kGCb), gcr = _mm256_set1_ps(kGCr);
  const __m256 bcb = _mm256_set1_ps(kBCb);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 vy = _mm256_loadu_ps(y + i);
    const __m256 dcb = _mm256_sub_ps(_mm256_loadu_ps(cb + i), off);
    const __m256 dcr = _mm256_sub_ps(_mm256_loadu_ps(cr + i), off);
    const __m256 vr = _mm256_add_ps(vy, _mm256_mul_ps(rcr, dcr));
    __m256 vg = _mm256_sub_ps(vy, _mm256_mul_ps(gcb, dcb));
    vg = _mm256_sub_ps(vg, _mm256_mul_ps(gcr, dcr));
    const __m256 vb = _mm256_add_ps(vy, _mm256_mul_ps(bcb, dcb));
    _mm256_storeu_ps(r + i, _mm256_div_ps(vr, scale));
    _mm256_storeu_ps(g + i, _mm256_div_ps(vg, scale));
    _mm256_storeu_ps(b + i, _mm256_div_ps(vb, scale));
  }
  if (i < n) {
    scalar_kernels().ycbcr_to_rgb(y + i, cb + i, cr + i, r + i, g + i, b + i,
                                  n - i);
  }
}

constexpr KernelTable kAvx2Table{Isa::kAvx2, axpy_avx2, dot_avx2,
                                 rgb_to_ycbcr_avx2, ycbcr_to_rgb_avx2};

}  // namespace

const KernelTable& avx2_table() { return kAvx2Table; }

}  // namespace chromaflow::simd::detail
