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

#ifndef CHROMAFLOW_WARP_HPP_
#define CHROMAFLOW_WARP_HPP_

#include <cstddef>
#include <utility>

#include "chromaflow/diff_op.hpp"
#include "chromaflow/rng.hpp"
#include "chromaflow/tensor.hpp"

namespace chromaflow {

// Per-pixel displacement field, 2 x H x W. Plane 0 is the row offset (di),
// plane 1 the column offset (dj), both in pixels. Output pixel (i, j) reads
// the source at (i + di, j + dj).
template <typename T>
struct BasicFlowField {
  BasicTensor<T> displacements;

  BasicFlowField() = default;
  explicit BasicFlowField(BasicTensor<T> d);
  BasicFlowField(std::size_t height, std::size_t width);

  std::size_t height() const { return displacements.dim(1); }
  std::size_t width() const { return displacements.dim(2); }
  T di(std::size_t i, std::size_t j) const { return displacements.at(0, i, j); }
  T dj(std::size_t i, std::size_t j) const { return displacements.at(1, i, j); }
};

using FlowField = BasicFlowField<float>;
using FlowFieldD = BasicFlowField<double>;

inline constexpr double kDefaultInitScale = 0.01;

// Each component i.i.d. uniform in [-scale, scale).
template <typename T>
BasicFlowField<T> init_flow(std::size_t height, std::size_t width, Rng& rng,
                            double scale = kDefaultInitScale);

// Elementwise tanh, bounding every displacement to (-1, 1).
template <typename T>
BasicFlowField<T> restrict_flow(const BasicFlowField<T>& flow);

// Gradient through tanh given the restricted (post-tanh) values.
template <typename T>
BasicTensor<T> restrict_flow_backward(const BasicFlowField<T>& restricted,
                                      const BasicTensor<T>& grad_output);

// Bilinear warp of every channel of a C x H x W tensor. Sample coordinates
// are clamped to [0, H-1] x [0, W-1].
template <typename T>
BasicTensor<T> apply_flow(const BasicTensor<T>& channels,
                          const BasicFlowField<T>& flow);

template <typename T>
struct WarpGradients {
  BasicTensor<T> channels;  // C x H x W
  BasicTensor<T> flow;      // 2 x H x W
};

// At integer sample coordinates the flow gradient takes the right-sided
// derivative; outside the clamp range it is zero.
template <typename T>
WarpGradients<T> apply_flow_backward(const BasicTensor<T>& channels,
                                     const BasicFlowField<T>& flow,
                                     const BasicTensor<T>& grad_output);

template <typename T>
class TanhOp final : public DiffOp<T> {
 protected:
  typename DiffOp<T>::Tensors do_forward(
      const typename DiffOp<T>::Tensors& inputs) override;
  typename DiffOp<T>::Tensors do_backward(
      const typename DiffOp<T>::Tensors& grads) override;

 private:
  BasicTensor<T> output_;
};

// Inputs: {channels (C x H x W), flow (2 x H x W)}.
template <typename T>
class WarpOp final : public DiffOp<T> {
 protected:
  typename DiffOp<T>::Tensors do_forward(
      const typename DiffOp<T>::Tensors& inputs) override;
  typename DiffOp<T>::Tensors do_backward(
      const typename DiffOp<T>::Tensors& grads) override;

 private:
  BasicTensor<T> channels_;
  BasicFlowField<T> flow_;
};

}  // namespace chromaflow

#endif  // CHROMAFLOW_WARP_HPP_
