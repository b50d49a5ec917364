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

#ifndef CHROMAFLOW_SIMD_KERNELS_HPP_
#define CHROMAFLOW_SIMD_KERNELS_HPP_

#include <cstddef>

namespace chromaflow::simd {

enum class Isa { kScalar, kAvx2 };

const char* isa_name(Isa isa);

// Float inner loops with one scalar reference implementation and optional
// vector variants. All variants of a kernel must agree: bit-exactly for the
// elementwise color kernels, within reassociation error for reductions.
struct KernelTable {
  Isa isa;
  // y[i] += a * x[i]
  void (*axpy)(float a, const float* x, float* y, std::size_t n);
  // sum x[i] * y[i]
  float (*dot)(const float* x, const float* y, std::size_t n);
  // RGB planes in [0,1] -> Y, Cb, Cr planes on the [0,255] scale.
  void (*rgb_to_ycbcr)(const float* r, const float* g, const float* b,
                       float* y, float* cb, float* cr, std::size_t n);
  // Inverse of the above (no clipping).
  void (*ycbcr_to_rgb)(const float* y, const float* cb, const float* cr,
                       float* r, float* g, float* b, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the build lacks AVX2 support or the CPU does not report
// AVX2 and FMA.
const KernelTable* avx2_kernels();

// Chosen once on first use: the widest supported table, unless the
// CHROMAFLOW_SIMD environment variable is set to "scalar".
const KernelTable& active_kernels();

inline Isa active_isa() { return active_kernels().isa; }

// Overload set used by the templated numeric code: float dispatches to the
// active table, other types take the generic loop.
inline void axpy(float a, const float* x, float* y, std::size_t n) {
  active_kernels().axpy(a, x, y, n);
}
inline float dot(const float* x, const float* y, std::size_t n) {
  return active_kernels().dot(x, y, n);
}

template <typename T>
void axpy(T a, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

template <typename T>
T dot(const T* x, const T* y, std::size_t n) {
  T acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

}  // namespace chromaflow::simd

#endif  // CHROMAFLOW_SIMD_KERNELS_HPP_
