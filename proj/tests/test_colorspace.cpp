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

#include "chromaflow/colorspace.hpp"
#include "chromaflow/error.hpp"
#include "chromaflow/rng.hpp"

namespace chromaflow {
namespace {

// Independent long-double reference for sRGB -> CIELAB (D65 white taken as
// the matrix row sums).
struct LabRef {
  long double l, a, b;
};

LabRef lab_reference(long double r, long double g, long double b) {
  auto lin = [](long double c) {
    return c <= 0.04045L ? c / 12.92L : std::pow((c + 0.055L) / 1.055L, 2.4L);
  };
  const long double rl = lin(r), gl = lin(g), bl = lin(b);
  const long double m[3][3] = {{0.412453L, 0.357580L, 0.180423L},
                               {0.212671L, 0.715160L, 0.072169L},
                               {0.019334L, 0.119193L, 0.950227L}};
  long double xyz[3];
  for (int k = 0; k < 3; ++k) {
    const long double white = m[k][0] + m[k][1] + m[k][2];
    xyz[k] = (m[k][0] * rl + m[k][1] * gl + m[k][2] * bl) / white;
  }
  const long double d = 6.0L / 29.0L;
  auto f = [d](long double t) {
    return t > d * d * d ? std::cbrt(t) : t / (3 * d * d) + 4.0L / 29.0L;
  };
  return {116 * f(xyz[1]) - 16, 500 * (f(xyz[0]) - f(xyz[1])), 200 * (f(xyz[1]) - f(xyz[2]))};
}

Image random_image(std::size_t h, std::size_t w, Rng& rng, double lo = 0.0, double hi = 1.0) {
  Image img(h, w, ColorSpace::kRgb);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    img.pixels[i] = static_cast<float>(rng.uniform(lo, hi));
  }
  return img;
}

ImageD random_image_d(std::size_t h, std::size_t w, Rng& rng, double lo, double hi) {
  ImageD img(h, w, ColorSpace::kRgb);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = rng.uniform(lo, hi);
  return img;
}

TEST(YcbcrTest, PrimariesMatchJfifFormulas) {
  const float prim[6][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {0.2f, 0.4f, 0.6f},
                            {1, 1, 1}};
  for (const auto& p : prim) {
    Image img(1, 1, ColorSpace::kRgb);
    for (int c = 0; c < 3; ++c) img.at(c, 0, 0) = p[c];
    const Image out = rgb_to_ycbcr(img);
    const double R = 255.0 * p[0], G = 255.0 * p[1], B = 255.0 * p[2];
    EXPECT_NEAR(out.at(0, 0, 0), 0.299 * R + 0.587 * G + 0.114 * B, 1e-3);
    EXPECT_NEAR(out.at(1, 0, 0), 128 - 0.168736 * R - 0.331264 * G + 0.5 * B, 1e-3);
    EXPECT_NEAR(out.at(2, 0, 0), 128 + 0.5 * R - 0.418688 * G - 0.081312 * B, 1e-3);
    EXPECT_EQ(out.space, ColorSpace::kYcbcr);
  }
}

TEST(YcbcrTest, GrayGivesExactNeutralChroma) {
  Image img(4, 64, ColorSpace::kRgb);
  for (std::size_t k = 0; k < img.pixels.size() / 3; ++k) {
    const float v = static_cast<float>(k) / 255.0f;
    img.pixels[k] = img.pixels[k + 256] = img.pixels[k + 512] = v;
  }
  const Image ycc = rgb_to_ycbcr(img);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 64; ++j) {
      ASSERT_EQ(ycc.at(1, i, j), 128.0f);
      ASSERT_EQ(ycc.at(2, i, j), 128.0f);
    }
  }
  const ImageD yccd = rgb_to_ycbcr(img.cast<double>());
  for (std::size_t j = 0; j < 64; ++j) ASSERT_EQ(yccd.at(1, 0, j), 128.0);
}

TEST(YcbcrTest, RoundTripWithinTolerance) {
  Rng rng(21);
  const Image img = random_image(100, 100, rng);
  const Image back = ycbcr_to_rgb(rgb_to_ycbcr(img));
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    ASSERT_NEAR(back.pixels[i], img.pixels[i], 1e-5);
  }
}

TEST(YcbcrTest, WrongSpaceIsUsageError) {
  Image img(2, 2, ColorSpace::kLab);
  EXPECT_THROW(rgb_to_ycbcr(img), UsageError);
  EXPECT_THROW(ycbcr_to_rgb(Image(2, 2, ColorSpace::kRgb)), UsageError);
}

TEST(LabTest, MatchesLongDoubleReference) {
  Rng rng(22);
  const ImageD img = random_image_d(20, 20, rng, 0.0, 1.0);
  const ImageD lab = rgb_to_lab(img);
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t j = 0; j < 20; ++j) {
      const LabRef ref = lab_reference(img.at(0, i, j), img.at(1, i, j), img.at(2, i, j));
      ASSERT_NEAR(lab.at(0, i, j), static_cast<double>(ref.l), 1e-9);
      ASSERT_NEAR(lab.at(1, i, j), static_cast<double>(ref.a), 1e-9);
      ASSERT_NEAR(lab.at(2, i, j), static_cast<double>(ref.b), 1e-9);
    }
  }
}

TEST(LabTest, SrgbRedIsCloseToPublishedValue) {
  Image img(1, 1, ColorSpace::kRgb);
  img.at(0, 0, 0) = 1.0f;
  const Image lab = rgb_to_lab(img);
  EXPECT_NEAR(lab.at(0, 0, 0), 53.24, 0.02);
  EXPECT_NEAR(lab.at(1, 0, 0), 80.09, 0.05);
  EXPECT_NEAR(lab.at(2, 0, 0), 67.20, 0.05);
}

TEST(LabTest, WhiteAndGrayAreNeutral) {
  Image img(1, 256, ColorSpace::kRgb);
  for (std::size_t j = 0; j < 256; ++j) {
    img.at(0, 0, j) = img.at(1, 0, j) = img.at(2, 0, j) = static_cast<float>(j) / 255.0f;
  }
  const Image lab = rgb_to_lab(img);
  for (std::size_t j = 0; j < 256; ++j) {
    ASSERT_LT(std::abs(lab.at(1, 0, j)), 1e-6f);
    ASSERT_LT(std::abs(lab.at(2, 0, j)), 1e-6f);
  }
  EXPECT_NEAR(lab.at(0, 0, 255), 100.0, 1e-3);
  EXPECT_NEAR(lab.at(0, 0, 0), 0.0, 1e-6);
}

TEST(LabTest, RoundTripWithinTolerance) {
  Rng rng(23);
  const Image img = random_image(100, 100, rng);
  const Image back = lab_to_rgb(rgb_to_lab(img));
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    ASSERT_NEAR(back.pixels[i], img.pixels[i], 1e-4);
  }
}

TEST(ConvertTest, IdentityAndThroughRgb) {
  Rng rng(24);
  const Image img = random_image(5, 7, rng);
  EXPECT_EQ(convert(img, ColorSpace::kRgb).pixels, img.pixels);
  const Image lab = convert(convert(img, ColorSpace::kYcbcr), ColorSpace::kLab);
  const Image direct = rgb_to_lab(img);
  for (std::size_t i = 0; i < lab.pixels.size(); ++i) {
    ASSERT_NEAR(lab.pixels[i], direct.pixels[i], 2e-3);
  }
}

TEST(LumaChromaTest, SplitConcatRoundTrip) {
  Rng rng(25);
  const Image ycc = rgb_to_ycbcr(random_image(6, 5, rng));
  const auto [luma, chroma] = split_luma_chroma(ycc);
  EXPECT_EQ(luma.shape(), (Shape{1, 6, 5}));
  EXPECT_EQ(chroma.shape(), (Shape{2, 6, 5}));
  const Image joined = concat_luma_chroma(luma, chroma, ColorSpace::kYcbcr);
  EXPECT_EQ(joined.pixels, ycc.pixels);
  EXPECT_EQ(joined.space, ColorSpace::kYcbcr);
}

TEST(ClipTest, ClampsAndRoutesGradient) {
  Image img(1, 2, ColorSpace::kRgb);
  img.pixels = Tensor({3, 1, 2}, std::vector<float>{-0.5f, 0.25f, 1.0f, 1.5f, 0.0f, 0.75f});
  const Image clipped = clip_to_gamut(img);
  EXPECT_EQ(clipped.pixels.storage(),
            (std::vector<float>{0.0f, 0.25f, 1.0f, 1.0f, 0.0f, 0.75f}));
  const Tensor g = clip_backward(img.pixels, Tensor({3, 1, 2}, 1.0f));
  EXPECT_EQ(g.storage(), (std::vector<float>{0, 1, 1, 0, 1, 1}));
}

class ConversionGradTest : public ::testing::TestWithParam<Conversion> {};

TEST_P(ConversionGradTest, MatchesCentralDifferences) {
  Rng rng(26 + static_cast<int>(GetParam()));
  for (int trial = 0; trial < 20; ++trial) {
    ImageD rgb = random_image_d(3, 4, rng, 0.02, 0.98);
    TensorD input = rgb.pixels;
    if (GetParam() == Conversion::kYcbcrToRgb) input = rgb_to_ycbcr(rgb).pixels;
    if (GetParam() == Conversion::kLabToRgb) input = rgb_to_lab(rgb).pixels;
    ColorConvertOp<double> op(GetParam());
    ASSERT_LT(grad_check(op, {input}, 1e-6), 1e-4) << "trial " << trial;
  }
}

INSTANTIATE_TEST_SUITE_P(AllConversions, ConversionGradTest,
                         ::testing::Values(Conversion::kRgbToYcbcr, Conversion::kYcbcrToRgb,
                                           Conversion::kRgbToLab, Conversion::kLabToRgb));

TEST(ClipGradTest, MatchesCentralDifferencesOffKink) {
  Rng rng(30);
  for (int trial = 0; trial < 20; ++trial) {
    TensorD x({3, 3, 3});
    for (std::size_t i = 0; i < x.size(); ++i) {
      // Keep every value at least 0.01 away from the kinks at 0 and 1.
      double v = rng.uniform(-0.4, 1.4);
      if (std::abs(v) < 0.01) v += 0.02;
      if (std::abs(v - 1.0) < 0.01) v += 0.02;
      x[i] = v;
    }
    ClipOp<double> op;
    ASSERT_LT(grad_check(op, {x}, 1e-6), 1e-4);
  }
}

}  // namespace
}  // namespace chromaflow
