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

#ifndef CHROMAFLOW_TRAIN_HPP_
#define CHROMAFLOW_TRAIN_HPP_

#include <cstddef>
#include <utility>
#include <vector>

#include "chromaflow/colorspace.hpp"
#include "chromaflow/model.hpp"
#include "chromaflow/rng.hpp"

namespace chromaflow {

struct LabeledImage {
  Image image;  // RGB in [0, 1]
  std::size_t label = 0;
};

struct TrainOptions {
  std::size_t epochs = 20;
  double lr = 1e-3;
  std::size_t batch_size = 32;
};

struct TrainReport {
  double initial_loss = 0.0;
  std::vector<double> epoch_loss;  // mean loss over the set after each epoch
  double final_accuracy = 0.0;
};

// Mean softmax cross-entropy and its gradient w.r.t. the logits.
std::pair<double, Tensor> softmax_cross_entropy(const Tensor& logits,
                                                std::size_t label);

std::size_t argmax(const Tensor& logits);
double mean_loss(const Classifier& model, const std::vector<LabeledImage>& data);
double accuracy(const Classifier& model, const std::vector<LabeledImage>& data);

// Mini-batch Adam on softmax cross-entropy. Deterministic given rng state.
// epochs == 0 returns the model unchanged.
Classifier train_toy(const Classifier& model,
                     const std::vector<LabeledImage>& data,
                     const TrainOptions& options, Rng& rng,
                     TrainReport* report = nullptr);

inline constexpr std::size_t kSyntheticPatterns = 10;

struct SyntheticOptions {
  std::size_t num_classes = 10;
  std::size_t height = 32;
  std::size_t width = 32;
};

// Two-color periodic textures (period 4 to 8 pixels, random phase). The class
// is the pattern: horizontal, vertical, diagonal and anti-diagonal stripes,
// checkerboard, dot lattice, grid lines, diamond checkerboard, concentric
// rings and wavy stripes. Foreground and background take random saturated
// colors whose hues differ by 90 to 270 degrees. Each pixel gets a gray
// offset in [-0.25, 0.25] (luminance grain) plus +-0.01 per-channel noise.
// num_classes must be at most kSyntheticPatterns.
Image make_synthetic_image(std::size_t label, Rng& rng,
                           const SyntheticOptions& options = {});

// per_class images of each class, in class-interleaved order.
std::vector<LabeledImage> make_synthetic_dataset(
    std::size_t per_class, Rng& rng, const SyntheticOptions& options = {});

}  // namespace chromaflow

#endif  // CHROMAFLOW_TRAIN_HPP_
