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
#include <cstring>
#include <vector>

#include "chromaflow/rng.hpp"
#include "chromaflow/simd/kernels.hpp"

namespace chromaflow::simd {
namespace {

std::vector<float> random_vector(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.uniform(lo, hi));
  return v;
}

class SimdEquivalenceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    vec_ = avx2_kernels();
    if (vec_ == nullptr) GTEST_SKIP() << "AVX2 not available on this machine";
  }
  const KernelTable& ref_ = scalar_kernels();
  const KernelTable* vec_ = nullptr;
};

TEST_F(SimdEquivalenceTest, AxpyMatchesReferenceForAllTailLengths) {
  Rng rng(11);
  for (std::size_t n = 0; n < 70; ++n) {
    const auto x = random_vector(n, rng);
    auto y_ref = random_vector(n, rng);
    auto y_vec = y_ref;
    ref_.axpy(0.37f, x.data(), y_ref.data(), n);
    vec_->axpy(0.37f, x.data(), y_vec.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      // The vector path fuses the multiply-add; one rounding may differ.
      ASSERT_NEAR(y_vec[i], y_ref[i], 2e-7f * (1.0f + std::abs(y_ref[i]))) << "n=" << n;
    }
  }
}

TEST_F(SimdEquivalenceTest, DotMatchesReferenceWithinReassociationError) {
  Rng rng(12);
  for (std::size_t n : {0u, 1u, 7u, 8u, 15u, 16u, 17u, 31u, 100u, 1023u, 4099u}) {
    const auto x = random_vector(n, rng);
    const auto y = random_vector(n, rng);
    double exact = 0.0, abs_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      exact += static_cast<double>(x[i]) * y[i];
      abs_sum += std::abs(static_cast<double>(x[i]) * y[i]);
    }
    const double bound = 1e-6 * (abs_sum + 1.0);
    EXPECT_NEAR(ref_.dot(x.data(), y.data(), n), exact, bound) << "n=" << n;
    EXPECT_NEAR(vec_->dot(x.data(), y.data(), n), exact, bound) << "n=" << n;
  }
}

TEST_F(SimdEquivalenceTest, ColorKernelsAreBitExact) {
  Rng rng(13);
  for (std::size_t n : {1u, 5u, 8u, 13u, 64u, 1000u}) {
    const auto r = random_vector(n, rng, 0.0, 1.0);
    const auto g = random_vector(n, rng, 0.0, 1.0);
    const auto b = random_vector(n, rng, 0.0, 1.0);
    std::vector<float> y1(n), cb1(n), cr1(n), y2(n), cb2(n), cr2(n);
    ref_.rgb_to_ycbcr(r.data(), g.data(), b.data(), y1.data(), cb1.data(), cr1.data(), n);
    vec_->rgb_to_ycbcr(r.data(), g.data(), b.data(), y2.data(), cb2.data(), cr2.data(), n);
    EXPECT_EQ(0, std::memcmp(y1.data(), y2.data(), n * sizeof(float)));
    EXPECT_EQ(0, std::memcmp(cb1.data(), cb2.data(), n * sizeof(float)));
    EXPECT_EQ(0, std::memcmp(cr1.data(), cr2.data(), n * sizeof(float)));

    std::vector<float> r1(n), g1(n), b1(n), r2(n), g2(n), b2(n);
    ref_.ycbcr_to_rgb(y1.data(), cb1.data(), cr1.data(), r1.data(), g1.data(), b1.data(), n);
    vec_->ycbcr_to_rgb(y1.data(), cb1.data(), cr1.data(), r2.data(), g2.data(), b2.data(), n);
    EXPECT_EQ(0, std::memcmp(r1.data(), r2.data(), n * sizeof(float)));
    EXPECT_EQ(0, std::memcmp(g1.data(), g2.data(), n * sizeof(float)));
    EXPECT_EQ(0, std::memcmp(b1.data(), b2.data(), n * sizeof(float)));
  }
}

TEST(SimdDispatchTest, ActiveTableIsOneOfTheKnownTables) {
  const KernelTable& active = active_kernels();
  EXPECT_TRUE(&active == &scalar_kernels() || &active == avx2_kernels());
  EXPECT_STREQ(isa_name(Isa::kScalar), "scalar");
}

TEST(SimdDispatchTest, GenericOverloadsUseDoublePrecision) {
  // 1 + 1e-10 is representable in double but rounds to 1 in float.
  const double x[2] = {1.0, 1e-10};
  const double y[2] = {1.0, 1.0};
  EXPECT_EQ(dot(x, y, 2), 1.0 + 1e-10);
}

}  // namespace
}  // namespace chromaflow::simd
