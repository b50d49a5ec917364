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

#include "chromaflow/warp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chromaflow {
namespace {

// Sample position along one axis: clamped coordinate, lower knot, upper
// knot, fractional weight of the upper knot, and d(coord)/d(displacement).
template <typename T>
struct AxisSample {
  std::size_t lo;
  std::size_t hi;
  T frac;
  T dcoord;
};

template <typename T>
AxisSample<T> sample_axis(std::size_t index, T displacement, std::size_t extent) {
  const T max_coord = static_cast<T>(extent - 1);
  const T raw = static_cast<T>(index) + displacement;
  const T coord = std::clamp(raw, T(0), max_coord);
  // Right-sided derivative: at raw == 0 moving right stays inside, at
  // raw == max_coord it leaves.
  const T dcoord = (raw >= T(0) && raw < max_coord) ? T(1) : T(0);
  auto lo = static_cast<std::size_t>(std::floor(coord));
  if (lo > extent - 1) lo = extent - 1;
  const std::size_t hi = std::min(lo + 1, extent - 1);
  return {lo, hi, coord - static_cast<T>(lo), dcoord};
}

template <typename T>
void check_shapes(const BasicTensor<T>& channels, const BasicFlowField<T>& flow,
                  const char* op) {
  if (channels.rank() != 3 || channels.dim(1) != flow.height() ||
      channels.dim(2) != flow.width()) {
    throw UsageError(std::string(op) + ": channels " +
                     shape_to_string(channels.shape()) +
                     " do not match flow " +
                     shape_to_string(flow.displacements.shape()));
  }
}

}  // namespace

template <typename T>
BasicFlowField<T>::BasicFlowField(BasicTensor<T> d) : displacements(std::move(d)) {
  if (displacements.rank() != 3 || displacements.dim(0) != 2) {
    throw UsageError("FlowField: expected 2 x H x W, got " +
                     shape_to_string(displacements.shape()));
  }
}

template <typename T>
BasicFlowField<T>::BasicFlowField(std::size_t height, std::size_t width)
    : displacements(Shape{2, height, width}) {}

template <typename T>
BasicFlowField<T> init_flow(std::size_t height, std::size_t width, Rng& rng,
                            double scale) {
  if (!(scale >= 0.0)) throw UsageError("init_flow: scale must be >= 0");
  BasicFlowField<T> flow(height, width);
  if (scale == 0.0) return flow;
  for (T& v : flow.displacements.data()) {
    v = static_cast<T>(rng.uniform(-scale, scale));
  }
  return flow;
}

template <typename T>
BasicFlowField<T> restrict_flow(const BasicFlowField<T>& flow) {
  BasicFlowField<T> out = flow;
  for (T& v : out.displacements.data()) v = std::tanh(v);
  return out;
}

template <typename T>
BasicTensor<T> restrict_flow_backward(const BasicFlowField<T>& restricted,
                                      const BasicTensor<T>& grad_output) {
  if (grad_output.shape() != restricted.displacements.shape()) {
    throw UsageError("restrict_flow_backward: gradient shape mismatch");
  }
  BasicTensor<T> grad(grad_output.shape());
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const T t = restricted.displacements[i];
    grad[i] = grad_output[i] * (T(1) - t * t);
  }
  return grad;
}

template <typename T>
BasicTensor<T> apply_flow(const BasicTensor<T>& channels,
                          const BasicFlowField<T>& flow) {
  check_shapes(channels, flow, "apply_flow");
  const std::size_t C = channels.dim(0), H = channels.dim(1), W = channels.dim(2);
  BasicTensor<T> out(channels.shape());
  for (std::size_t i = 0; i < H; ++i) {
    for (std::size_t j = 0; j < W; ++j) {
      const auto r = sample_axis(i, flow.di(i, j), H);
      const auto c = sample_axis(j, flow.dj(i, j), W);
      const T w00 = (T(1) - r.frac) * (T(1) - c.frac);
      const T w01 = (T(1) - r.frac) * c.frac;
      const T w10 = r.frac * (T(1) - c.frac);
      const T w11 = r.frac * c.frac;
      for (std::size_t ch = 0; ch < C; ++ch) {
        out.at(ch, i, j) = w00 * channels.at(ch, r.lo, c.lo) +
                           w01 * channels.at(ch, r.lo, c.hi) +
                           w10 * channels.at(ch, r.hi, c.lo) +
                           w11 * channels.at(ch, r.hi, c.hi);
      }
    }
  }
  return out;
}

template <typename T>
WarpGradients<T> apply_flow_backward(const BasicTensor<T>& channels,
                                     const BasicFlowField<T>& flow,
                                     const BasicTensor<T>& grad_output) {
  check_shapes(channels, flow, "apply_flow_backward");
  if (grad_output.shape() != channels.shape()) {
    throw UsageError("apply_flow_backward: gradient shape mismatch");
  }
  const std::size_t C = channels.dim(0), H = channels.dim(1), W = channels.dim(2);
  WarpGradients<T> grads{BasicTensor<T>(channels.shape()),
                         BasicTensor<T>(flow.displacements.shape())};
  for (std::size_t i = 0; i < H; ++i) {
    for (std::size_t j = 0; j < W; ++j) {
      const auto r = sample_axis(i, flow.di(i, j), H);
      const auto c = sample_axis(j, flow.dj(i, j), W);
      const T w00 = (T(1) - r.frac) * (T(1) - c.frac);
      const T w01 = (T(1) - r.frac) * c.frac;
      const T w10 = r.frac * (T(1) - c.frac);
      const T w11 = r.frac * c.frac;
      T g_row = 0, g_col = 0;
      for (std::size_t ch = 0; ch < C; ++ch) {
        const T g = grad_output.at(ch, i, j);
        const T v00 = channels.at(ch, r.lo, c.lo);
        const T v01 = channels.at(ch, r.lo, c.hi);
        const T v10 = channels.at(ch, r.hi, c.lo);
        const T v11 = channels.at(ch, r.hi, c.hi);
        grads.channels.at(ch, r.lo, c.lo) += w00 * g;
        grads.channels.at(ch, r.lo, c.hi) += w01 * g;
        grads.channels.at(ch, r.hi, c.lo) += w10 * g;
        grads.channels.at(ch, r.hi, c.hi) += w11 * g;
        // When lo == hi the difference terms vanish, which is the
        // one-sided derivative at the clamped border.
        g_row += g * ((T(1) - c.frac) * (v10 - v00) + c.frac * (v11 - v01));
        g_col += g * ((T(1) - r.frac) * (v01 - v00) + r.frac * (v11 - v10));
      }
      grads.flow.at(0, i, j) = g_row * r.dcoord;
      grads.flow.at(1, i, j) = g_col * c.dcoord;
    }
  }
  return grads;
}

template <typename T>
typename DiffOp<T>::Tensors TanhOp<T>::do_forward(
    const typename DiffOp<T>::Tensors& inputs) {
  if (inputs.size() != 1) throw UsageError("TanhOp takes one input");
  output_ = inputs[0];
  for (T& v : output_.data()) v = std::tanh(v);
  return {output_};
}

template <typename T>
typename DiffOp<T>::Tensors TanhOp<T>::do_backward(
    const typename DiffOp<T>::Tensors& grads) {
  const BasicTensor<T>& g = grads.at(0);
  BasicTensor<T> out(g.shape());
  for (std::size_t i = 0; i < g.size(); ++i) {
    out[i] = g[i] * (T(1) - output_[i] * output_[i]);
  }
  return {out};
}

template <typename T>
typename DiffOp<T>::Tensors WarpOp<T>::do_forward(
    const typename DiffOp<T>::Tensors& inputs) {
  if (inputs.size() != 2) throw UsageError("WarpOp takes {channels, flow}");
  channels_ = inputs[0];
  flow_ = BasicFlowField<T>(inputs[1]);
  return {apply_flow(channels_, flow_)};
}

template <typename T>
typename DiffOp<T>::Tensors WarpOp<T>::do_backward(
    const typename DiffOp<T>::Tensors& grads) {
  auto g = apply_flow_backward(channels_, flow_, grads.at(0));
  return {std::move(g.channels), std::move(g.flow)};
}

#define CHROMAFLOW_INSTANTIATE_WARP(T)                                        \
  template struct BasicFlowField<T>;                                          \
  template BasicFlowField<T> init_flow<T>(std::size_t, std::size_t, Rng&,     \
                                          double);                            \
  template BasicFlowField<T> restrict_flow(const BasicFlowField<T>&);         \
  template BasicTensor<T> restrict_flow_backward(const BasicFlowField<T>&,    \
                                                 const BasicTensor<T>&);      \
  template BasicTensor<T> apply_flow(const BasicTensor<T>&,                   \
                                     const BasicFlowField<T>&);               \
  template WarpGradients<T> apply_flow_backward(                              \
      const BasicTensor<T>&, const BasicFlowField<T>&, const BasicTensor<T>&); \
  template class TanhOp<T>;                                                   \
  template class WarpOp<T>;

CHROMAFLOW_INSTANTIATE_WARP(float)
CHROMAFLOW_INSTANTIATE_WARP(double)

}  // namespace chromaflow
