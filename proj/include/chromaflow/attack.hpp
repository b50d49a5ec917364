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

#ifndef CHROMAFLOW_ATTACK_HPP_
#define CHROMAFLOW_ATTACK_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "chromaflow/adam.hpp"
#include "chromaflow/colorspace.hpp"
#include "chromaflow/diff_op.hpp"
#include "chromaflow/metrics.hpp"
#include "chromaflow/model.hpp"
#include "chromaflow/warp.hpp"

namespace chromaflow {

// Which channels the flow field moves.
enum class AttackMode {
  kYcbcrChroma,  // Cb, Cr
  kLabChroma,    // a*, b*
  kRgbAll,       // R, G, B (plain spatial-transform baseline)
};

const char* attack_mode_name(AttackMode mode);  // "ycbcr", "lab", "rgb"
std::optional<AttackMode> parse_attack_mode(const std::string& name);

struct AttackConfig {
  AttackMode mode = AttackMode::kYcbcrChroma;
  bool restricted = false;  // tanh-bound the flow to (-1, 1)
  double kappa = 0.0;
  std::size_t max_iters = 500;
  double lr = 0.01;
  double init_scale = kDefaultInitScale;
  std::uint64_t seed = 0;

  // Throws UsageError on max_iters == 0, lr <= 0, kappa < 0, init_scale < 0.
  void validate() const;
};

struct AttackResult {
  bool success = false;
  std::size_t iterations_used = 0;
  Image adversarial;
  Logits<float> final_logits;
  double final_loss = 0.0;
  MetricReport metrics;
};

// Carlini-Wagner margin loss max(max_{i != t} Z_i - Z_t, -kappa).
// Gradient is +1 on the best competitor (lowest index on ties) and -1 on the
// target while the margin branch is active, zero once clamped.
template <typename T>
std::pair<double, BasicTensor<T>> cw_loss(const BasicTensor<T>& logits,
                                          std::size_t target, double kappa);

// Z_t - max_{i != t} Z_i >= kappa.
template <typename T>
bool is_success(const BasicTensor<T>& logits, std::size_t target, double kappa);

// CW loss as a DiffOp over {logits}, producing a 1-element tensor.
template <typename T>
class CwLossOp final : public DiffOp<T> {
 public:
  CwLossOp(std::size_t target, double kappa) : target_(target), kappa_(kappa) {}

 protected:
  typename DiffOp<T>::Tensors do_forward(
      const typename DiffOp<T>::Tensors& inputs) override;
  typename DiffOp<T>::Tensors do_backward(
      const typename DiffOp<T>::Tensors& grads) override;

 private:
  std::size_t target_;
  double kappa_;
  BasicTensor<T> grad_;
};

// flow -> adversarial RGB image, with the benign image's colorspace
// conversion done once up front. forward() keeps the context needed by the
// following backward().
template <typename T>
class Synthesizer {
 public:
  Synthesizer(const BasicImage<T>& benign, AttackMode mode, bool restricted);

  BasicImage<T> forward(const BasicFlowField<T>& flow);
  // d(loss)/d(flow) from d(loss)/d(adversarial RGB).
  BasicTensor<T> backward(const BasicTensor<T>& grad_rgb) const;

  // Pre-clip RGB of the last forward; values outside [0,1] were clipped.
  const BasicTensor<T>& unclipped() const { return pre_clip_; }

 private:
  AttackMode mode_;
  bool restricted_;
  ColorSpace space_;
  BasicTensor<T> luma_;
  BasicTensor<T> warp_source_;  // chroma planes, or RGB for kRgbAll
  // Context of the last forward.
  BasicFlowField<T> effective_flow_;
  BasicTensor<T> warped_color_;  // full 3-plane image in space_, pre-conversion
  BasicTensor<T> pre_clip_;
  bool has_context_ = false;
};

// One-shot synthesis (no gradient).
template <typename T>
BasicImage<T> synthesize(const BasicImage<T>& benign, const BasicFlowField<T>& flow,
                         AttackMode mode, bool restricted);

// Synthesizer as a DiffOp over {flow} for gradient checks.
template <typename T>
class SynthesizeOp final : public DiffOp<T> {
 public:
  SynthesizeOp(const BasicImage<T>& benign, AttackMode mode, bool restricted)
      : synth_(benign, mode, restricted) {}

 protected:
  typename DiffOp<T>::Tensors do_forward(
      const typename DiffOp<T>::Tensors& inputs) override;
  typename DiffOp<T>::Tensors do_backward(
      const typename DiffOp<T>::Tensors& grads) override;

 private:
  Synthesizer<T> synth_;
};

// Optimizes the flow with Adam against the CW loss until the target wins by
// kappa or the iteration budget runs out. On failure the result carries the
// lowest-loss iterate.
AttackResult run_attack(const Image& benign, std::size_t target,
                        const Classifier& model, const AttackConfig& config);

}  // namespace chromaflow

#endif  // CHROMAFLOW_ATTACK_HPP_
