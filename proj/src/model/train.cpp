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

#include "chromaflow/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chromaflow/adam.hpp"

namespace chromaflow {

std::pair<double, Tensor> softmax_cross_entropy(const Tensor& logits,
                                                std::size_t label) {
  if (label >= logits.size()) {
    throw UsageError("softmax_cross_entropy: label " + std::to_string(label) +
                     " out of range for " + std::to_string(logits.size()) + " classes");
  }
  double max_v = logits[0];
  for (float v : logits.data()) max_v = std::max(max_v, static_cast<double>(v));
  double z = 0.0;
  for (float v : logits.data()) z += std::exp(v - max_v);
  Tensor grad(logits.shape());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    grad[i] = static_cast<float>(std::exp(logits[i] - max_v) / z);
  }
  grad[label] -= 1.0f;
  const double loss = -(logits[label] - max_v - std::log(z));
  return {loss, grad};
}

std::size_t argmax(const Tensor& logits) {
  const auto d = logits.data();
  return static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
}

double mean_loss(const Classifier& model, const std::vector<LabeledImage>& data) {
  if (data.empty()) return 0.0;
  double total = 0.0;
  for (const auto& item : data) {
    total += softmax_cross_entropy(model.predict(item.image.pixels), item.label).first;
  }
  return total / static_cast<double>(data.size());
}

double accuracy(const Classifier& model, const std::vector<LabeledImage>& data) {
  if (data.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& item : data) {
    if (argmax(model.predict(item.image.pixels)) == item.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

Classifier train_toy(const Classifier& model, const std::vector<LabeledImage>& data,
                     const TrainOptions& options, Rng& rng, TrainReport* report) {
  if (data.empty()) throw UsageError("train_toy: empty dataset");
  if (options.batch_size == 0) throw UsageError("train_toy: batch_size must be >= 1");
  for (const auto& item : data) {
    if (item.label >= model.num_classes()) {
      throw UsageError("train_toy: label " + std::to_string(item.label) +
                       " >= num_classes " + std::to_string(model.num_classes()));
    }
  }
  Classifier trained = model;
  if (report != nullptr) {
    report->epoch_loss.clear();
    report->initial_loss = mean_loss(trained, data);
  }

  auto& params = trained.mutable_params();
  std::vector<AdamState> w_state, b_state;
  for (const auto& p : params) {
    w_state.emplace_back(p.weight.empty() ? Shape{1} : p.weight.shape());
    b_state.emplace_back(p.bias.empty() ? Shape{1} : p.bias.shape());
  }

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  ForwardContext<float> ctx;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.uniform_index(i)]);
    }
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      std::vector<LayerParams<float>> acc;
      for (std::size_t k = start; k < end; ++k) {
        const LabeledImage& item = data[order[k]];
        const Tensor logits = trained.forward(item.image.pixels, ctx);
        auto [loss, grad] = softmax_cross_entropy(logits, item.label);
        ModelGradients<float> g = trained.backward(ctx, grad);
        if (acc.empty()) {
          acc = std::move(g.params);
          continue;
        }
        for (std::size_t l = 0; l < acc.size(); ++l) {
          for (std::size_t q = 0; q < acc[l].weight.size(); ++q) acc[l].weight[q] += g.params[l].weight[q];
          for (std::size_t q = 0; q < acc[l].bias.size(); ++q) acc[l].bias[q] += g.params[l].bias[q];
        }
      }
      const float inv = 1.0f / static_cast<float>(end - start);
      for (std::size_t l = 0; l < params.size(); ++l) {
        if (params[l].weight.empty()) continue;
        for (float& v : acc[l].weight.data()) v *= inv;
        for (float& v : acc[l].bias.data()) v *= inv;
        adam_step(w_state[l], params[l].weight, acc[l].weight, options.lr);
        adam_step(b_state[l], params[l].bias, acc[l].bias, options.lr);
      }
    }
    if (report != nullptr) report->epoch_loss.push_back(mean_loss(trained, data));
  }
  if (report != nullptr) report->final_accuracy = accuracy(trained, data);
  return trained;
}

}  // namespace chromaflow
