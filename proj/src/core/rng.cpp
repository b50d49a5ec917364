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

#include "chromaflow/rng.hpp"

#include <cmath>

#include "chromaflow/error.hpp"

namespace chromaflow {

double Rng::uniform(double lo, double hi) {
  if (!(lo < hi)) throw UsageError("Rng::uniform requires lo < hi");
  double v = lo + (hi - lo) * next_double();
  // lo + (hi-lo)*u can round up to hi for u close to 1.
  if (v >= hi) v = std::nextafter(hi, lo);
  return v;
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw UsageError("Rng::uniform_index requires n > 0");
  // 53-bit float scaling; bias is below n * 2^-53.
  const auto i = static_cast<std::size_t>(next_double() * static_cast<double>(n));
  return i < n ? i : n - 1;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  Rng mixer(base ^ (stream * 0xD1B54A32D192ED03ULL));
  mixer.next_u64();
  return mixer.next_u64();
}

}  // namespace chromaflow
