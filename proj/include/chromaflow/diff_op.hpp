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

#ifndef CHROMAFLOW_DIFF_OP_HPP_
#define CHROMAFLOW_DIFF_OP_HPP_

#include <cstdint>
#include <vector>

#include "chromaflow/error.hpp"
#include "chromaflow/tensor.hpp"

namespace chromaflow {

// A differentiable operation: forward saves whatever context backward needs,
// backward maps output gradients to input gradients (one per input, same
// shapes). backward() before any forward() is a usage error.
template <typename T>
class DiffOp {
 public:
  using TensorT = BasicTensor<T>;
  using Tensors = std::vector<TensorT>;

  virtual ~DiffOp() = default;

  Tensors forward(const Tensors& inputs) {
    Tensors out = do_forward(inputs);
    input_shapes_.clear();
    for (const auto& t : inputs) input_shapes_.push_back(t.shape());
    has_context_ = true;
    return out;
  }

  Tensors backward(const Tensors& grad_outputs) {
    if (!has_context_) {
      throw UsageError("DiffOp::backward called without a prior forward");
    }
    Tensors grads = do_backward(grad_outputs);
    if (grads.size() != input_shapes_.size()) {
      throw UsageError("DiffOp::backward returned wrong gradient count");
    }
    for (std::size_t i = 0; i < grads.size(); ++i) {
      if (grads[i].shape() != input_shapes_[i]) {
        throw UsageError("DiffOp::backward gradient " + std::to_string(i) +
                         " has shape " + shape_to_string(grads[i].shape()) +
                         ", expected " + shape_to_string(input_shapes_[i]));
      }
    }
    return grads;
  }

  bool has_context() const { return has_context_; }

 protected:
  virtual Tensors do_forward(const Tensors& inputs) = 0;
  virtual Tensors do_backward(const Tensors& grad_outputs) = 0;

 private:
  bool has_context_ = false;
  std::vector<Shape> input_shapes_;
};

template <typename T>
class IdentityOp final : public DiffOp<T> {
 protected:
  typename DiffOp<T>::Tensors do_forward(
      const typename DiffOp<T>::Tensors& inputs) override {
    return inputs;
  }
  typename DiffOp<T>::Tensors do_backward(
      const typename DiffOp<T>::Tensors& grads) override {
    return grads;
  }
};

struct GradCheckOptions {
  double step = 1e-3;
  std::uint64_t seed = 0x6a09e667f3bcc908ULL;
  // Inputs to perturb; empty means all of them.
  std::vector<std::size_t> check_inputs;
  // For ops that are piecewise linear in each coordinate (ReLU networks):
  // skip a coordinate when its forward and backward one-sided differences
  // disagree by more than kink_tolerance relative, i.e. the step straddles
  // a kink. Curvature of a smooth op also trips this, so leave it off there.
  bool skip_kinks = false;
  double kink_tolerance = 1e-4;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t worst_input = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // kink-straddling coordinates (skip_kinks only)
};

// Compares op.backward against central differences of a random scalar
// projection <r, op(x)>. Relative error per coordinate is
// |a - n| / max(|a|, |n|, 1e-8); the report carries the worst coordinate.
// Throws NumericError if any forward output is non-finite.
GradCheckReport grad_check_report(DiffOp<double>& op,
                                  std::vector<TensorD> inputs,
                                  const GradCheckOptions& options = {});

inline double grad_check(DiffOp<double>& op, std::vector<TensorD> inputs,
                         double h = 1e-3) {
  GradCheckOptions options;
  options.step = h;
  return grad_check_report(op, std::move(inputs), options).max_relative_error;
}

}  // namespace chromaflow

#endif  // CHROMAFLOW_DIFF_OP_HPP_
