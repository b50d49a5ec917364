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

#ifndef CHROMAFLOW_COLORSPACE_HPP_
#define CHROMAFLOW_COLORSPACE_HPP_

#include <cstddef>
#include <string>
#include <utility>

#include "chromaflow/diff_op.hpp"
#include "chromaflow/tensor.hpp"

namespace chromaflow {

// Value conventions:
//   kRgb    channels in [0, 1]
//   kYcbcr  Y, Cb, Cr on the [0, 255] scale with chroma centered at 128
//   kLab    L in [0, 100], a*, b* roughly in [-127, 127]
enum class ColorSpace { kRgb, kYcbcr, kLab };

const char* colorspace_name(ColorSpace space);

// Planar 3 x H x W raster tagged with its colorspace.
template <typename T>
struct BasicImage {
  BasicTensor<T> pixels;
  ColorSpace space = ColorSpace::kRgb;

  BasicImage() = default;
  BasicImage(BasicTensor<T> p, ColorSpace s);
  BasicImage(std::size_t height, std::size_t width, ColorSpace s,
             T fill = T{0});

  std::size_t height() const { return pixels.dim(1); }
  std::size_t width() const { return pixels.dim(2); }
  T& at(std::size_t c, std::size_t i, std::size_t j) {
    return pixels.at(c, i, j);
  }
  const T& at(std::size_t c, std::size_t i, std::size_t j) const {
    return pixels.at(c, i, j);
  }

  template <typename U>
  BasicImage<U> cast() const {
    return BasicImage<U>(pixels.template cast<U>(), space);
  }
};

using Image = BasicImage<float>;
using ImageD = BasicImage<double>;

template <typename T>
BasicImage<T> rgb_to_ycbcr(const BasicImage<T>& img);
template <typename T>
BasicImage<T> ycbcr_to_rgb(const BasicImage<T>& img);
template <typename T>
BasicImage<T> rgb_to_lab(const BasicImage<T>& img);
template <typename T>
BasicImage<T> lab_to_rgb(const BasicImage<T>& img);

// Converts to the requested space through RGB. Identity when spaces match.
template <typename T>
BasicImage<T> convert(const BasicImage<T>& img, ColorSpace target);

// Vector-Jacobian products. `input` is the tensor the forward conversion
// was applied to; `grad_output` is dL/d(output). YCbCr maps are affine and
// do not need the input.
template <typename T>
BasicTensor<T> rgb_to_ycbcr_backward(const BasicTensor<T>& grad_output);
template <typename T>
BasicTensor<T> ycbcr_to_rgb_backward(const BasicTensor<T>& grad_output);
template <typename T>
BasicTensor<T> rgb_to_lab_backward(const BasicTensor<T>& rgb_input,
                                   const BasicTensor<T>& grad_output);
template <typename T>
BasicTensor<T> lab_to_rgb_backward(const BasicTensor<T>& lab_input,
                                   const BasicTensor<T>& grad_output);

// Luma plane (1 x H x W) and chroma planes (2 x H x W).
template <typename T>
std::pair<BasicTensor<T>, BasicTensor<T>> split_luma_chroma(
    const BasicImage<T>& img);
template <typename T>
BasicImage<T> concat_luma_chroma(const BasicTensor<T>& luma,
                                 const BasicTensor<T>& chroma,
                                 ColorSpace space);

// Clamp RGB to [0, 1]. The backward passes gradient where the pre-clip
// value was already inside [0, 1] and zero where it was clamped.
template <typename T>
BasicImage<T> clip_to_gamut(const BasicImage<T>& img);
template <typename T>
BasicTensor<T> clip_backward(const BasicTensor<T>& pre_clip,
                             const BasicTensor<T>& grad_output);

// DiffOp adapters over a single 3 x H x W tensor.
enum class Conversion { kRgbToYcbcr, kYcbcrToRgb, kRgbToLab, kLabToRgb };

template <typename T>
class ColorConvertOp final : public DiffOp<T> {
 public:
  explicit ColorConvertOp(Conversion conversion) : conversion_(conversion) {}

 protected:
  typename DiffOp<T>::Tensors do_forward(
      const typename DiffOp<T>::Tensors& inputs) override;
  typename DiffOp<T>::Tensors do_backward(
      const typename DiffOp<T>::Tensors& grads) override;

 private:
  Conversion conversion_;
  BasicTensor<T> input_;
};

template <typename T>
class ClipOp final : public DiffOp<T> {
 protected:
  typename DiffOp<T>::Tensors do_forward(
      const typename DiffOp<T>::Tensors& inputs) override;
  typename DiffOp<T>::Tensors do_backward(
      const typename DiffOp<T>::Tensors& grads) override;

 private:
  BasicTensor<T> input_;
};

// CIELAB constants: sRGB (D65) to XYZ matrix rows.
inline constexpr double kRgbToXyz[3][3] = {
    {0.412453, 0.357580, 0.180423},
    {0.212671, 0.715160, 0.072169},
    {0.019334, 0.119193, 0.950227},
};

// Reference white used to normalize XYZ: the matrix row sums, i.e. the
// D65 white (0.950456, 1.0, 1.088754) as this matrix represents it. Using
// the row sums keeps every neutral RGB at a* = b* = 0.
inline constexpr double kLabWhite[3] = {
    kRgbToXyz[0][0] + kRgbToXyz[0][1] + kRgbToXyz[0][2],
    kRgbToXyz[1][0] + kRgbToXyz[1][1] + kRgbToXyz[1][2],
    kRgbToXyz[2][0] + kRgbToXyz[2][1] + kRgbToXyz[2][2],
};

}  // namespace chromaflow

#endif  // CHROMAFLOW_COLORSPACE_HPP_
