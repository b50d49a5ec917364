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

#ifndef CHROMAFLOW_MODEL_HPP_
#define CHROMAFLOW_MODEL_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "chromaflow/diff_op.hpp"
#include "chromaflow/rng.hpp"
#include "chromaflow/tensor.hpp"

namespace chromaflow {

struct Conv2dSpec {
  std::size_t out_channels;
  std::size_t kernel_h;
  std::size_t kernel_w;
  std::size_t stride = 1;
  std::size_t padding = 0;
};
struct ReluSpec {};
struct MaxPool2dSpec {
  std::size_t window;
  std::size_t stride;
};
struct FlattenSpec {};
struct DenseSpec {
  std::size_t out_features;
};

using LayerSpec =
    std::variant<Conv2dSpec, ReluSpec, MaxPool2dSpec, FlattenSpec, DenseSpec>;

struct Architecture {
  Shape input_shape;  // C x H x W
  std::vector<LayerSpec> layers;
};

// 3x32x32 -> conv(16,3x3,p1) -> relu -> maxpool(2) -> conv(32,3x3,p1) ->
// relu -> maxpool(2) -> flatten -> dense(num_classes).
Architecture reference_architecture(std::size_t num_classes = 10,
                                    std::size_t height = 32,
                                    std::size_t width = 32);

// Output shape of every layer; throws UsageError naming the first
// inconsistent layer.
std::vector<Shape> infer_shapes(const Architecture& arch);

template <typename T>
struct LayerParams {
  BasicTensor<T> weight;  // empty for parameter-free layers
  BasicTensor<T> bias;
};

template <typename T>
using Logits = BasicTensor<T>;

// Saved activations of one forward pass. One context per in-flight
// evaluation; the model itself is never mutated by forward/backward.
template <typename T>
struct ForwardContext {
  std::vector<BasicTensor<T>> inputs;  // input of each layer
  std::vector<std::vector<std::size_t>> argmax;  // maxpool routing
  bool valid = false;
};

template <typename T>
struct ModelGradients {
  BasicTensor<T> input;
  std::vector<LayerParams<T>> params;
};

template <typename T>
class BasicClassifier {
 public:
  BasicClassifier() = default;
  // Takes ownership of parameters; validates shapes against the
  // architecture.
  BasicClassifier(Architecture arch, std::vector<LayerParams<T>> params);

  // Glorot-uniform weights, zero biases.
  static BasicClassifier init(const Architecture& arch, Rng& rng);

  const Architecture& architecture() const { return arch_; }
  const Shape& input_shape() const { return arch_.input_shape; }
  std::size_t num_classes() const { return shapes_.back()[0]; }
  const std::vector<LayerParams<T>>& params() const { return params_; }
  std::vector<LayerParams<T>>& mutable_params() { return params_; }
  std::size_t parameter_count() const;

  Logits<T> forward(const BasicTensor<T>& input, ForwardContext<T>& ctx) const;
  Logits<T> predict(const BasicTensor<T>& input) const;

  // d(loss)/d(input) given d(loss)/d(logits).
  BasicTensor<T> backward_input(const ForwardContext<T>& ctx,
                                const BasicTensor<T>& grad_logits) const;
  // Input gradient plus every parameter gradient.
  ModelGradients<T> backward(const ForwardContext<T>& ctx,
                             const BasicTensor<T>& grad_logits) const;

  template <typename U>
  BasicClassifier<U> cast() const;

 private:
  BasicTensor<T> backward_impl(const ForwardContext<T>& ctx,
                               const BasicTensor<T>& grad_logits,
                               std::vector<LayerParams<T>>* param_grads) const;

  Architecture arch_;
  std::vector<Shape> shapes_;  // output shape per layer
  std::vector<LayerParams<T>> params_;
};

using Classifier = BasicClassifier<float>;
using ClassifierD = BasicClassifier<double>;

// Glorot bound sqrt(6 / (fan_in + fan_out)) for a conv or dense layer.
double glorot_bound(std::size_t fan_in, std::size_t fan_out);

// Image (+ optionally all parameters) -> logits, for gradient checks.
// Inputs: {image} or {image, w0, b0, w1, b1, ...} over parametrized layers.
template <typename T>
class ClassifierOp final : public DiffOp<T> {
 public:
  ClassifierOp(BasicClassifier<T> model, bool params_as_inputs)
      : model_(std::move(model)), params_as_inputs_(params_as_inputs) {}

  // Current parameters flattened into the input order described above.
  std::vector<BasicTensor<T>> parameter_inputs() const;

 protected:
  typename DiffOp<T>::Tensors do_forward(
      const typename DiffOp<T>::Tensors& inputs) override;
  typename DiffOp<T>::Tensors do_backward(
      const typename DiffOp<T>::Tensors& grads) override;

 private:
  BasicClassifier<T> model_;
  bool params_as_inputs_;
  ForwardContext<T> ctx_;
};

// Weight file ("CFN1"), little-endian:
//   magic "CFN1", u32 record count, then per record:
//   u8 tag, u32 rank, u32 dims[rank], f32 payload.
// Record 0 is the input shape (tag 0, dims C,H,W, no payload); see
// docs/formats.md for the per-layer encodings.
void save_weights(const Classifier& model, const std::filesystem::path& path);
Classifier load_weights(const std::filesystem::path& path);
std::string serialize_weights(const Classifier& model);
Classifier deserialize_weights(const std::string& bytes);

}  // namespace chromaflow

#endif  // CHROMAFLOW_MODEL_HPP_
