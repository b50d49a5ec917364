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

#include "chromaflow/attack.hpp"

#include <cmath>
#include <limits>

namespace chromaflow {
namespace {

template <typename T>
std::pair<double, std::size_t> margin_and_rival(const BasicTensor<T>& logits,
                                                std::size_t target) {
  if (logits.rank() != 1 || logits.size() < 2) {
    throw UsageError("cw_loss: need a logits vector with at least 2 classes, got " +
                     shape_to_string(logits.shape()));
  }
  if (target >= logits.size()) {
    throw UsageError("cw_loss: target " + std::to_string(target) + " out of range for " +
                     std::to_string(logits.size()) + " classes");
  }
  std::size_t rival = target == 0 ? 1 : 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (i != target && logits[i] > logits[rival]) rival = i;
  }
  return {static_cast<double>(logits[rival]) - static_cast<double>(logits[target]), rival};
}

template <typename T>
BasicImage<T> to_rgb(const BasicImage<T>& color) {
  return color.space == ColorSpace::kLab ? lab_to_rgb(color) : ycbcr_to_rgb(color);
}

}  // namespace

const char* attack_mode_name(AttackMode mode) {
  switch (mode) {
    case AttackMode::kYcbcrChroma:
      return "ycbcr";
    case AttackMode::kLabChroma:
      return "lab";
    case AttackMode::kRgbAll:
      return "rgb";
  }
  return "unknown";
}

std::optional<AttackMode> parse_attack_mode(const std::string& name) {
  if (name == "ycbcr") return AttackMode::kYcbcrChroma;
  if (name == "lab") return AttackMode::kLabChroma;
  if (name == "rgb") return AttackMode::kRgbAll;
  return std::nullopt;
}

void AttackConfig::validate() const {
  if (max_iters < 1) throw UsageError("attack: max_iters must be >= 1");
  if (!(lr > 0.0)) throw UsageError("attack: lr must be > 0");
  if (!(kappa >= 0.0)) throw UsageError("attack: kappa must be >= 0");
  if (!(init_scale >= 0.0)) throw UsageError("attack: init_scale must be >= 0");
}

template <typename T>
std::pair<double, BasicTensor<T>> cw_loss(const BasicTensor<T>& logits,
                                          std::size_t target, double kappa) {
  const auto [margin, rival] = margin_and_rival(logits, target);
  BasicTensor<T> grad(logits.shape());
  if (margin > -kappa) {
    grad[rival] = T(1);
    grad[target] = T(-1);
    return {margin, grad};
  }
  return {-kappa, grad};
}

template <typename T>
bool is_success(const BasicTensor<T>& logits, std::size_t target, double kappa) {
  return margin_and_rival(logits, target).first <= -kappa;
}

template <typename T>
typename DiffOp<T>::Tensors CwLossOp<T>::do_forward(
    const typename DiffOp<T>::Tensors& inputs) {
  if (inputs.size() != 1) throw UsageError("CwLossOp takes one input");
  auto [loss, grad] = cw_loss(inputs[0], target_, kappa_);
  grad_ = std::move(grad);
  return {BasicTensor<T>(Shape{1}, std::vector<T>{static_cast<T>(loss)})};
}

template <typename T>
typename DiffOp<T>::Tensors CwLossOp<T>::do_backward(
    const typename DiffOp<T>::Tensors& grads) {
  BasicTensor<T> out = grad_;
  const T scale = grads.at(0)[0];
  for (T& v : out.data()) v *= scale;
  return {out};
}

template <typename T>
Synthesizer<T>::Synthesizer(const BasicImage<T>& benign, AttackMode mode, bool restricted)
    : mode_(mode), restricted_(restricted), space_(ColorSpace::kRgb) {
  if (benign.space != ColorSpace::kRgb) {
    throw UsageError("Synthesizer: benign image must be RGB");
  }
  if (mode == AttackMode::kRgbAll) {
    warp_source_ = benign.pixels;
    return;
  }
  space_ = mode == AttackMode::kLabChroma ? ColorSpace::kLab : ColorSpace::kYcbcr;
  auto [luma, chroma] = split_luma_chroma(convert(benign, space_));
  luma_ = std::move(luma);
  warp_source_ = std::move(chroma);
}

template <typename T>
BasicImage<T> Synthesizer<T>::forward(const BasicFlowField<T>& flow) {
  effective_flow_ = restricted_ ? restrict_flow(flow) : flow;
  BasicTensor<T> warped = apply_flow(warp_source_, effective_flow_);
  if (mode_ == AttackMode::kRgbAll) {
    pre_clip_ = std::move(warped);
  } else {
    BasicImage<T> color = concat_luma_chroma(luma_, warped, space_);
    pre_clip_ = to_rgb(color).pixels;
    warped_color_ = std::move(color.pixels);
  }
  has_context_ = true;
  return clip_to_gamut(BasicImage<T>(pre_clip_, ColorSpace::kRgb));
}

template <typename T>
BasicTensor<T> Synthesizer<T>::backward(const BasicTensor<T>& grad_rgb) const {
  if (!has_context_) throw UsageError("Synthesizer::backward without forward");
  BasicTensor<T> g = clip_backward(pre_clip_, grad_rgb);
  BasicTensor<T> g_warped;
  if (mode_ == AttackMode::kRgbAll) {
    g_warped = std::move(g);
  } else {
    const BasicTensor<T> g_color = space_ == ColorSpace::kLab
                                       ? lab_to_rgb_backward(warped_color_, g)
                                       : ycbcr_to_rgb_backward(g);
    const std::size_t n = g_color.dim(1) * g_color.dim(2);
    g_warped = BasicTensor<T>(Shape{2, g_color.dim(1), g_color.dim(2)},
                              std::vector<T>(g_color.data().begin() + n, g_color.data().end()));
  }
  BasicTensor<T> g_flow = apply_flow_backward(warp_source_, effective_flow_, g_warped).flow;
  if (restricted_) g_flow = restrict_flow_backward(effective_flow_, g_flow);
  return g_flow;
}

template <typename T>
BasicImage<T> synthesize(const BasicImage<T>& benign, const BasicFlowField<T>& flow,
                         AttackMode mode, bool restricted) {
  Synthesizer<T> synth(benign, mode, restricted);
  return synth.forward(flow);
}

template <typename T>
typename DiffOp<T>::Tensors SynthesizeOp<T>::do_forward(
    const typename DiffOp<T>::Tensors& inputs) {
  if (inputs.size() != 1) throw UsageError("SynthesizeOp takes {flow}");
  return {synth_.forward(BasicFlowField<T>(inputs[0])).pixels};
}

template <typename T>
typename DiffOp<T>::Tensors SynthesizeOp<T>::do_backward(
    const typename DiffOp<T>::Tensors& grads) {
  return {synth_.backward(grads.at(0))};
}

AttackResult run_attack(const Image& benign, std::size_t target, const Classifier& model,
                        const AttackConfig& config) {
  config.validate();
  if (benign.space != ColorSpace::kRgb) throw UsageError("run_attack: input must be RGB");
  if (benign.pixels.shape() != model.input_shape()) {
    throw UsageError("run_attack: image shape " + shape_to_string(benign.pixels.shape()) +
                     " does not match model input " + shape_to_string(model.input_shape()));
  }
  if (target >= model.num_classes()) {
    throw UsageError("run_attack: target " + std::to_string(target) + " out of range for " +
                     std::to_string(model.num_classes()) + " classes");
  }

  Rng rng(config.seed);
  FlowField flow = init_flow<float>(benign.height(), benign.width(), rng, config.init_scale);
  Synthesizer<float> synth(benign, config.mode, config.restricted);
  AdamState adam(flow.displacements.shape());
  ForwardContext<float> ctx;

  AttackResult result;
  double best_loss = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < config.max_iters; ++it) {
    Image adversarial = synth.forward(flow);
    Logits<float> logits = model.forward(adversarial.pixels, ctx);
    auto [loss, grad_logits] = cw_loss(logits, target, config.kappa);
    if (!std::isfinite(loss)) {
      throw NumericError("run_attack: non-finite loss at iteration " + std::to_string(it));
    }
    if (is_success(logits, target, config.kappa)) {
      result.success = true;
      result.iterations_used = it;
      result.adversarial = std::move(adversarial);
      result.final_logits = std::move(logits);
      result.final_loss = loss;
      break;
    }
    if (loss < best_loss) {
      best_loss = loss;
      result.adversarial = adversarial;
      result.final_logits = logits;
      result.final_loss = loss;
    }
    const Tensor grad_image = model.backward_input(ctx, grad_logits);
    const Tensor grad_flow = synth.backward(grad_image);
    if (!grad_flow.all_finite()) {
      throw NumericError("run_attack: non-finite flow gradient at iteration " +
                         std::to_string(it));
    }
    adam_step(adam, flow.displacements, grad_flow, config.lr);
  }
  if (!result.success) result.iterations_used = config.max_iters;
  if (benign.height() >= kSsimWindow && benign.width() >= kSsimWindow) {
    result.metrics = measure(benign, result.adversarial);
  } else {
    // Too small for the SSIM window; report the norms only.
    const LpNorms norms = lp_norms(benign, result.adversarial);
    result.metrics.ssim = result.metrics.ms_ssim = std::nan("");
    result.metrics.one_minus_ssim = result.metrics.one_minus_ms_ssim = std::nan("");
    result.metrics.l0 = norms.l0;
    result.metrics.l2 = norms.l2;
    result.metrics.linf = norms.linf;
    result.metrics.colorfulness_benign = colorfulness(benign);
  }
  return result;
}

#define CHROMAFLOW_INSTANTIATE_ATTACK(T)                                           \
  template std::pair<double, BasicTensor<T>> cw_loss(const BasicTensor<T>&,        \
                                                     std::size_t, double);         \
  template bool is_success(const BasicTensor<T>&, std::size_t, double);            \
  template class CwLossOp<T>;                                                      \
  template class Synthesizer<T>;                                                   \
  template BasicImage<T> synthesize(const BasicImage<T>&, const BasicFlowField<T>&, \
                                    AttackMode, bool);                             \
  template class SynthesizeOp<T>;

CHROMAFLOW_INSTANTIATE_ATTACK(float)
CHROMAFLOW_INSTANTIATE_ATTACK(double)

}  // namespace chromaflow
