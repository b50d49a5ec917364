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

#ifndef CHROMAFLOW_ADAM_HPP_
#define CHROMAFLOW_ADAM_HPP_

#include <cstddef>

#include "chromaflow/tensor.hpp"

namespace chromaflow {

// Adam with bias correction. One state per parameter tensor.
template <typename T>
struct BasicAdamState {
  BasicTensor<T> m;
  BasicTensor<T> v;
  std::size_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  BasicAdamState() = default;
  explicit BasicAdamState(const Shape& shape) : m(shape), v(shape) {}
};

using AdamState = BasicAdamState<float>;

// m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2;
// p <- p - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
template <typename T>
void adam_step(BasicAdamState<T>& state, BasicTensor<T>& params,
               const BasicTensor<T>& grads, double lr);

}  // namespace chromaflow

#endif  // CHROMAFLOW_ADAM_HPP_
