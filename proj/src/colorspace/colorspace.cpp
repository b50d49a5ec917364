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

#include "chromaflow/colorspace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <type_traits>

#include "chromaflow/simd/kernels.hpp"

namespace chromaflow {
namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 invert(const double (&m)[3][3]) {
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  Mat3 inv{};
  inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return inv;
}

const Mat3& xyz_to_rgb() {
  static const Mat3 inv = invert(kRgbToXyz);
  return inv;
}

// sRGB companding. The linear-side knot is the image of the gamma-side knot
// so the two branches of the inverse pair up exactly.
constexpr double kGammaKnot = 0.04045;
constexpr double kLinearKnot = kGammaKnot / 12.92;

double srgb_to_linear(double v) {
  return v <= kGammaKnot ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}
double srgb_to_linear_deriv(double v) {
  return v <= kGammaKnot ? 1.0 / 12.92
                         : 2.4 / 1.055 * std::pow((v + 0.055) / 1.055, 1.4);
}
double linear_to_srgb(double l) {
  return l <= kLinearKnot ? 12.92 * l : 1.055 * std::pow(l, 1.0 / 2.4) - 0.055;
}
double linear_to_srgb_deriv(double l) {
  return l <= kLinearKnot ? 12.92
                          : 1.055 / 2.4 * std::pow(l, 1.0 / 2.4 - 1.0);
}

// CIE f(t) and its inverse; delta = 6/29.
constexpr double kDelta = 6.0 / 29.0;
constexpr double kDelta3 = kDelta * kDelta * kDelta;
constexpr double kDelta2x3 = 3.0 * kDelta * kDelta;

double lab_f(double t) {
  return t > kDelta3 ? std::cbrt(t) : t / kDelta2x3 + 4.0 / 29.0;
}
double lab_f_deriv(double t) {
  if (t > kDelta3) {
    const double c = std::cbrt(t);
    return 1.0 / (3.0 * c * c);
  }
  return 1.0 / kDelta2x3;
}
double lab_f_inv(double u) {
  return u > kDelta ? u * u * u : kDelta2x3 * (u - 4.0 / 29.0);
}
double lab_f_inv_deriv(double u) {
  return u > kDelta ? 3.0 * u * u : kDelta2x3;
}

struct Rgb2LabPixel {
  std::array<double, 3> lin;  // linear RGB
  std::array<double, 3> t;    // XYZ / white
  std::array<double, 3> lab;
};

Rgb2LabPixel rgb_to_lab_pixel(double r, double g, double b) {
  Rgb2LabPixel p{};
  p.lin = {srgb_to_linear(r), srgb_to_linear(g), srgb_to_linear(b)};
  std::array<double, 3> f{};
  for (int c = 0; c < 3; ++c) {
    const double xyz = kRgbToXyz[c][0] * p.lin[0] + kRgbToXyz[c][1] * p.lin[1] +
                       kRgbToXyz[c][2] * p.lin[2];
    p.t[c] = xyz / kLabWhite[c];
    f[c] = lab_f(p.t[c]);
  }
  p.lab = {116.0 * f[1] - 16.0, 500.0 * (f[0] - f[1]), 200.0 * (f[1] - f[2])};
  return p;
}

struct Lab2RgbPixel {
  std::array<double, 3> fxyz;
  std::array<double, 3> lin;
  std::array<double, 3> rgb;
};

Lab2RgbPixel lab_to_rgb_pixel(double L, double a, double b) {
  Lab2RgbPixel p{};
  const double fy = (L + 16.0) / 116.0;
  p.fxyz = {fy + a / 500.0, fy, fy - b / 200.0};
  std::array<double, 3> xyz{};
  for (int c = 0; c < 3; ++c) xyz[c] = kLabWhite[c] * lab_f_inv(p.fxyz[c]);
  const Mat3& m = xyz_to_rgb();
  for (int c = 0; c < 3; ++c) {
    p.lin[c] = m[c][0] * xyz[0] + m[c][1] * xyz[1] + m[c][2] * xyz[2];
    p.rgb[c] = linear_to_srgb(p.lin[c]);
  }
  return p;
}

template <typename T>
void require_space(const BasicImage<T>& img, ColorSpace expected,
                   const char* op) {
  if (img.space != expected) {
    throw UsageError(std::string(op) + ": expected " +
                     colorspace_name(expected) + " input, got " +
                     colorspace_name(img.space));
  }
}

template <typename T>
void require_planar3(const BasicTensor<T>& t, const char* op) {
  if (t.rank() != 3 || t.dim(0) != 3) {
    throw UsageError(std::string(op) + ": expected a 3 x H x W tensor, got " +
                     shape_to_string(t.shape()));
  }
}

// Generic (non-SIMD) YCbCr loops in the same evaluation order as the float
// kernels.
template <typename T>
void rgb_to_ycbcr_generic(const T* r, const T* g, const T* b, T* y, T* cb,
                          T* cr, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const T R = r[i] * T(255), G = g[i] * T(255), B = b[i] * T(255);
    y[i] = T(0.299) * R + T(0.587) * G + T(0.114) * B;
    cb[i] = T(128) + T(0.168736) * (B - R) + T(0.331264) * (B - G);
    cr[i] = T(128) + T(0.418688) * (R - G) + T(0.081312) * (R - B);
  }
}

template <typename T>
void ycbcr_to_rgb_generic(const T* y, const T* cb, const T* cr, T* r, T* g,
                          T* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const T dcb = cb[i] - T(128), dcr = cr[i] - T(128);
    r[i] = (y[i] + T(1.402) * dcr) / T(255);
    g[i] = (y[i] - T(0.34414) * dcb - T(0.71414) * dcr) / T(255);
    b[i] = (y[i] + T(1.772) * dcb) / T(255);
  }
}

}  // namespace

const char* colorspace_name(ColorSpace space) {
  switch (space) {
    case ColorSpace::kRgb:
      return "RGB";
    case ColorSpace::kYcbcr:
      return "YCbCr";
    case ColorSpace::kLab:
      return "Lab";
  }
  return "unknown";
}

template <typename T>
BasicImage<T>::BasicImage(BasicTensor<T> p, ColorSpace s)
    : pixels(std::move(p)), space(s) {
  require_planar3(pixels, "Image");
}

template <typename T>
BasicImage<T>::BasicImage(std::size_t height, std::size_t width, ColorSpace s,
                          T fill)
    : pixels(Shape{3, height, width}, fill), space(s) {}

template <typename T>
BasicImage<T> rgb_to_ycbcr(const BasicImage<T>& img) {
  require_space(img, ColorSpace::kRgb, "rgb_to_ycbcr");
  BasicImage<T> out(img.height(), img.width(), ColorSpace::kYcbcr);
  const std::size_t n = img.height() * img.width();
  const T* in = img.pixels.raw();
  T* o = out.pixels.raw();
  if constexpr (std::is_same_v<T, float>) {
    simd::active_kernels().rgb_to_ycbcr(in, in + n, in + 2 * n, o, o + n,
                                        o + 2 * n, n);
  } else {
    rgb_to_ycbcr_generic(in, in + n, in + 2 * n, o, o + n, o + 2 * n, n);
  }
  return out;
}

template <typename T>
BasicImage<T> ycbcr_to_rgb(const BasicImage<T>& img) {
  require_space(img, ColorSpace::kYcbcr, "ycbcr_to_rgb");
  BasicImage<T> out(img.height(), img.width(), ColorSpace::kRgb);
  const std::size_t n = img.height() * img.width();
  const T* in = img.pixels.raw();
  T* o = out.pixels.raw();
  if constexpr (std::is_same_v<T, float>) {
    simd::active_kernels().ycbcr_to_rgb(in, in + n, in + 2 * n, o, o + n,
                                        o + 2 * n, n);
  } else {
    ycbcr_to_rgb_generic(in, in + n, in + 2 * n, o, o + n, o + 2 * n, n);
  }
  return out;
}

template <typename T>
BasicImage<T> rgb_to_lab(const BasicImage<T>& img) {
  require_space(img, ColorSpace::kRgb, "rgb_to_lab");
  BasicImage<T> out(img.height(), img.width(), ColorSpace::kLab);
  const std::size_t n = img.height() * img.width();
  const T* in = img.pixels.raw();
  T* o = out.pixels.raw();
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = rgb_to_lab_pixel(in[i], in[n + i], in[2 * n + i]);
    for (int c = 0; c < 3; ++c) o[c * n + i] = static_cast<T>(p.lab[c]);
  }
  return out;
}

template <typename T>
BasicImage<T> lab_to_rgb(const BasicImage<T>& img) {
  require_space(img, ColorSpace::kLab, "lab_to_rgb");
  BasicImage<T> out(img.height(), img.width(), ColorSpace::kRgb);
  const std::size_t n = img.height() * img.width();
  const T* in = img.pixels.raw();
  T* o = out.pixels.raw();
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = lab_to_rgb_pixel(in[i], in[n + i], in[2 * n + i]);
    for (int c = 0; c < 3; ++c) o[c * n + i] = static_cast<T>(p.rgb[c]);
  }
  return out;
}

template <typename T>
BasicImage<T> convert(const BasicImage<T>& img, ColorSpace target) {
  if (img.space == target) return img;
  BasicImage<T> rgb = img;
  if (img.space == ColorSpace::kYcbcr) rgb = ycbcr_to_rgb(img);
  if (img.space == ColorSpace::kLab) rgb = lab_to_rgb(img);
  switch (target) {
    case ColorSpace::kRgb:
      return rgb;
    case ColorSpace::kYcbcr:
      return rgb_to_ycbcr(rgb);
    case ColorSpace::kLab:
      return rgb_to_lab(rgb);
  }
  return rgb;
}

template <typename T>
BasicTensor<T> rgb_to_ycbcr_backward(const BasicTensor<T>& grad_output) {
  require_planar3(grad_output, "rgb_to_ycbcr_backward");
  BasicTensor<T> grad(grad_output.shape());
  const std::size_t n = grad.dim(1) * grad.dim(2);
  const T* g = grad_output.raw();
  T* o = grad.raw();
  for (std::size_t i = 0; i < n; ++i) {
    const T gy = g[i], gcb = g[n + i], gcr = g[2 * n + i];
    o[i] = T(255) * (T(0.299) * gy - T(0.168736) * gcb + T(0.5) * gcr);
    o[n + i] = T(255) * (T(0.587) * gy - T(0.331264) * gcb - T(0.418688) * gcr);
    o[2 * n + i] = T(255) * (T(0.114) * gy + T(0.5) * gcb - T(0.081312) * gcr);
  }
  return grad;
}

template <typename T>
BasicTensor<T> ycbcr_to_rgb_backward(const BasicTensor<T>& grad_output) {
  require_planar3(grad_output, "ycbcr_to_rgb_backward");
  BasicTensor<T> grad(grad_output.shape());
  const std::size_t n = grad.dim(1) * grad.dim(2);
  const T* g = grad_output.raw();
  T* o = grad.raw();
  for (std::size_t i = 0; i < n; ++i) {
    const T gr = g[i] / T(255), gg = g[n + i] / T(255),
            gb = g[2 * n + i] / T(255);
    o[i] = gr + gg + gb;
    o[n + i] = T(-0.34414) * gg + T(1.772) * gb;
    o[2 * n + i] = T(1.402) * gr - T(0.71414) * gg;
  }
  return grad;
}

template <typename T>
BasicTensor<T> rgb_to_lab_backward(const BasicTensor<T>& rgb_input,
                                   const BasicTensor<T>& grad_output) {
  require_planar3(rgb_input, "rgb_to_lab_backward");
  if (grad_output.shape() != rgb_input.shape()) {
    throw UsageError("rgb_to_lab_backward: gradient shape mismatch");
  }
  BasicTensor<T> grad(rgb_input.shape());
  const std::size_t n = grad.dim(1) * grad.dim(2);
  const T* in = rgb_input.raw();
  const T* g = grad_output.raw();
  T* o = grad.raw();
  for (std::size_t i = 0; i < n; ++i) {
    const double v[3] = {in[i], in[n + i], in[2 * n + i]};
    const auto p = rgb_to_lab_pixel(v[0], v[1], v[2]);
    const double gL = g[i], ga = g[n + i], gb = g[2 * n + i];
    const double gf[3] = {500.0 * ga, 116.0 * gL - 500.0 * ga + 200.0 * gb,
                          -200.0 * gb};
    double gxyz[3];
    for (int c = 0; c < 3; ++c) {
      gxyz[c] = gf[c] * lab_f_deriv(p.t[c]) / kLabWhite[c];
    }
    for (int k = 0; k < 3; ++k) {
      const double glin = kRgbToXyz[0][k] * gxyz[0] +
                          kRgbToXyz[1][k] * gxyz[1] + kRgbToXyz[2][k] * gxyz[2];
      o[k * n + i] = static_cast<T>(glin * srgb_to_linear_deriv(v[k]));
    }
  }
  return grad;
}

template <typename T>
BasicTensor<T> lab_to_rgb_backward(const BasicTensor<T>& lab_input,
                                   const BasicTensor<T>& grad_output) {
  require_planar3(lab_input, "lab_to_rgb_backward");
  if (grad_output.shape() != lab_input.shape()) {
    throw UsageError("lab_to_rgb_backward: gradient shape mismatch");
  }
  BasicTensor<T> grad(lab_input.shape());
  const std::size_t n = grad.dim(1) * grad.dim(2);
  const T* in = lab_input.raw();
  const T* g = grad_output.raw();
  T* o = grad.raw();
  const Mat3& m = xyz_to_rgb();
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = lab_to_rgb_pixel(in[i], in[n + i], in[2 * n + i]);
    double glin[3];
    for (int c = 0; c < 3; ++c) {
      glin[c] = static_cast<double>(g[c * n + i]) * linear_to_srgb_deriv(p.lin[c]);
    }
    double gf[3];
    for (int k = 0; k < 3; ++k) {
      const double gxyz = m[0][k] * glin[0] + m[1][k] * glin[1] + m[2][k] * glin[2];
      gf[k] = gxyz * kLabWhite[k] * lab_f_inv_deriv(p.fxyz[k]);
    }
    o[i] = static_cast<T>((gf[0] + gf[1] + gf[2]) / 116.0);
    o[n + i] = static_cast<T>(gf[0] / 500.0);
    o[2 * n + i] = static_cast<T>(-gf[2] / 200.0);
  }
  return grad;
}

template <typename T>
std::pair<BasicTensor<T>, BasicTensor<T>> split_luma_chroma(
    const BasicImage<T>& img) {
  if (img.space == ColorSpace::kRgb) {
    throw UsageError("split_luma_chroma: RGB has no luma/chroma split");
  }
  const std::size_t h = img.height(), w = img.width(), n = h * w;
  BasicTensor<T> luma(Shape{1, h, w});
  BasicTensor<T> chroma(Shape{2, h, w});
  const auto src = img.pixels.data();
  std::copy(src.begin(), src.begin() + n, luma.raw());
  std::copy(src.begin() + n, src.end(), chroma.raw());
  return {std::move(luma), std::move(chroma)};
}

template <typename T>
BasicImage<T> concat_luma_chroma(const BasicTensor<T>& luma,
                                 const BasicTensor<T>& chroma,
                                 ColorSpace space) {
  if (space == ColorSpace::kRgb) {
    throw UsageError("concat_luma_chroma: target space must be YCbCr or Lab");
  }
  if (luma.rank() != 3 || luma.dim(0) != 1 || chroma.rank() != 3 ||
      chroma.dim(0) != 2 || luma.dim(1) != chroma.dim(1) ||
      luma.dim(2) != chroma.dim(2)) {
    throw UsageError("concat_luma_chroma: incompatible shapes " +
                     shape_to_string(luma.shape()) + " and " +
                     shape_to_string(chroma.shape()));
  }
  BasicImage<T> out(luma.dim(1), luma.dim(2), space);
  std::copy(luma.data().begin(), luma.data().end(), out.pixels.raw());
  std::copy(chroma.data().begin(), chroma.data().end(),
            out.pixels.raw() + luma.size());
  return out;
}

template <typename T>
BasicImage<T> clip_to_gamut(const BasicImage<T>& img) {
  require_space(img, ColorSpace::kRgb, "clip_to_gamut");
  BasicImage<T> out = img;
  for (T& v : out.pixels.data()) v = std::clamp(v, T(0), T(1));
  return out;
}

template <typename T>
BasicTensor<T> clip_backward(const BasicTensor<T>& pre_clip,
                             const BasicTensor<T>& grad_output) {
  if (pre_clip.shape() != grad_output.shape()) {
    throw UsageError("clip_backward: gradient shape mismatch");
  }
  BasicTensor<T> grad(grad_output.shape());
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const T v = pre_clip[i];
    grad[i] = (v >= T(0) && v <= T(1)) ? grad_output[i] : T(0);
  }
  return grad;
}

template <typename T>
typename DiffOp<T>::Tensors ColorConvertOp<T>::do_forward(
    const typename DiffOp<T>::Tensors& inputs) {
  if (inputs.size() != 1) throw UsageError("ColorConvertOp takes one input");
  input_ = inputs[0];
  switch (conversion_) {
    case Conversion::kRgbToYcbcr:
      return {rgb_to_ycbcr(BasicImage<T>(input_, ColorSpace::kRgb)).pixels};
    case Conversion::kYcbcrToRgb:
      return {ycbcr_to_rgb(BasicImage<T>(input_, ColorSpace::kYcbcr)).pixels};
    case Conversion::kRgbToLab:
      return {rgb_to_lab(BasicImage<T>(input_, ColorSpace::kRgb)).pixels};
    case Conversion::kLabToRgb:
      return {lab_to_rgb(BasicImage<T>(input_, ColorSpace::kLab)).pixels};
  }
  return {};
}

template <typename T>
typename DiffOp<T>::Tensors ColorConvertOp<T>::do_backward(
    const typename DiffOp<T>::Tensors& grads) {
  switch (conversion_) {
    case Conversion::kRgbToYcbcr:
      return {rgb_to_ycbcr_backward(grads.at(0))};
    case Conversion::kYcbcrToRgb:
      return {ycbcr_to_rgb_backward(grads.at(0))};
    case Conversion::kRgbToLab:
      return {rgb_to_lab_backward(input_, grads.at(0))};
    case Conversion::kLabToRgb:
      return {lab_to_rgb_backward(input_, grads.at(0))};
  }
  return {};
}

template <typename T>
typename DiffOp<T>::Tensors ClipOp<T>::do_forward(
    const typename DiffOp<T>::Tensors& inputs) {
  if (inputs.size() != 1) throw UsageError("ClipOp takes one input");
  input_ = inputs[0];
  return {clip_to_gamut(BasicImage<T>(input_, ColorSpace::kRgb)).pixels};
}

template <typename T>
typename DiffOp<T>::Tensors ClipOp<T>::do_backward(
    const typename DiffOp<T>::Tensors& grads) {
  return {clip_backward(input_, grads.at(0))};
}

#define CHROMAFLOW_INSTANTIATE_COLORSPACE(T)                                  \
  template struct BasicImage<T>;                                              \
  template BasicImage<T> rgb_to_ycbcr(const BasicImage<T>&);                  \
  template BasicImage<T> ycbcr_to_rgb(const BasicImage<T>&);                  \
  template BasicImage<T> rgb_to_lab(const BasicImage<T>&);                    \
  template BasicImage<T> lab_to_rgb(const BasicImage<T>&);                    \
  template BasicImage<T> convert(const BasicImage<T>&, ColorSpace);           \
  template BasicTensor<T> rgb_to_ycbcr_backward(const BasicTensor<T>&);       \
  template BasicTensor<T> ycbcr_to_rgb_backward(const BasicTensor<T>&);       \
  template BasicTensor<T> rgb_to_lab_backward(const BasicTensor<T>&,          \
                                              const BasicTensor<T>&);         \
  template BasicTensor<T> lab_to_rgb_backward(const BasicTensor<T>&,          \
                                              const BasicTensor<T>&);         \
  template std::pair<BasicTensor<T>, BasicTensor<T>> split_luma_chroma(       \
      const BasicImage<T>&);                                                  \
  template BasicImage<T> concat_luma_chroma(                                  \
      const BasicTensor<T>&, const BasicTensor<T>&, ColorSpace);              \
  template BasicImage<T> clip_to_gamut(const BasicImage<T>&);                 \
  template BasicTensor<T> clip_backward(const BasicTensor<T>&,                \
                                        const BasicTensor<T>&);               \
  template class ColorConvertOp<T>;                                           \
  template class ClipOp<T>;

CHROMAFLOW_INSTANTIATE_COLORSPACE(float)
CHROMAFLOW_INSTANTIATE_COLORSPACE(double)

}  // namespace chromaflow
