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

#include "chromaflow/adam.hpp"

#include <cmath>

#include "chromaflow/error.hpp"

namespace chromaflow {

template <typename T>
void adam_step(BasicAdamState<T>& state, BasicTensor<T>& params,
               const BasicTensor<T>& grads, double lr) {
  if (params.shape() != grads.shape() || state.m.shape() != params.shape() ||
      state.v.shape() != params.shape()) {
    throw UsageError("adam_step: shape mismatch between params " +
                     shape_to_string(params.shape()) + ", grads " +
                     shape_to_string(grads.shape()) + " and state " +
                     shape_to_string(state.m.shape()));
  }
  state.t += 1;
  const double b1 = state.beta1, b2 = state.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    const double m = b1 * state.m[i] + (1.0 - b1) * g;
    const double v = b2 * state.v[i] + (1.0 - b2) * g * g;
    state.m[i] = static_cast<T>(m);
    state.v[i] = static_cast<T>(v);
    const double m_hat = m / correction1;
    const double v_hat = v / correction2;
    params[i] = static_cast<T>(params[i] - lr * m_hat / (std::sqrt(v_hat) + state.eps));
  }
}

template void adam_step(BasicAdamState<float>&, BasicTensor<float>&,
                        const BasicTensor<float>&, double);
template void adam_step(BasicAdamState<double>&, BasicTensor<double>&,
                        const BasicTensor<double>&, double);

}  // namespace chromaflow
