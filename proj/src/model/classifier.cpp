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

#include "chromaflow/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>

#include "chromaflow/simd/kernels.hpp"

namespace chromaflow {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string layer_name(const LayerSpec& spec) {
  return std::visit(Overloaded{
                        [](const Conv2dSpec&) { return std::string("conv2d"); },
                        [](const ReluSpec&) { return std::string("relu"); },
                        [](const MaxPool2dSpec&) { return std::string("maxpool2d"); },
                        [](const FlattenSpec&) { return std::string("flatten"); },
                        [](const DenseSpec&) { return std::string("dense"); },
                    },
                    spec);
}

// Shapes of the weight and bias tensors of a layer, given its input shape.
// Empty shapes for parameter-free layers.
std::pair<Shape, Shape> param_shapes(const LayerSpec& spec, const Shape& in) {
  if (const auto* conv = std::get_if<Conv2dSpec>(&spec)) {
    return {Shape{conv->out_channels, in[0], conv->kernel_h, conv->kernel_w},
            Shape{conv->out_channels}};
  }
  if (const auto* dense = std::get_if<DenseSpec>(&spec)) {
    return {Shape{dense->out_features, shape_size(in)},
            Shape{dense->out_features}};
  }
  return {{}, {}};
}

// ---- convolution ---------------------------------------------------------

struct ConvGeometry {
  std::size_t in_c, in_h, in_w;
  std::size_t out_c, out_h, out_w;
  std::size_t kh, kw, stride, pad;
  std::size_t padded_h() const { return in_h + 2 * pad; }
  std::size_t padded_w() const { return in_w + 2 * pad; }
};

ConvGeometry conv_geometry(const Conv2dSpec& spec, const Shape& in,
                           const Shape& out) {
  return {in[0], in[1], in[2], out[0], out[1], out[2],
          spec.kernel_h, spec.kernel_w, spec.stride, spec.padding};
}

template <typename T>
std::vector<T> pad_planes(const BasicTensor<T>& x, const ConvGeometry& g) {
  const std::size_t hp = g.padded_h(), wp = g.padded_w();
  std::vector<T> padded(g.in_c * hp * wp, T(0));
  for (std::size_t c = 0; c < g.in_c; ++c) {
    for (std::size_t i = 0; i < g.in_h; ++i) {
      const T* src = x.raw() + (c * g.in_h + i) * g.in_w;
      std::copy(src, src + g.in_w,
                padded.begin() + (c * hp + i + g.pad) * wp + g.pad);
    }
  }
  return padded;
}

// Stride-1 convolution evaluated on the padded-width grid: every
// (out channel, in channel, tap) pair is one contiguous axpy over the whole
// plane. Columns >= out_w of the grid are scratch.
template <typename T>
BasicTensor<T> conv_forward(const BasicTensor<T>& x, const LayerParams<T>& p,
                            const ConvGeometry& g) {
  BasicTensor<T> y(Shape{g.out_c, g.out_h, g.out_w});
  if (g.stride == 1) {
    const std::size_t hp = g.padded_h(), wp = g.padded_w();
    const std::vector<T> padded = pad_planes(x, g);
    const std::size_t span = (g.out_h - 1) * wp + g.out_w;
    std::vector<T> grid(g.out_h * wp);
    for (std::size_t oc = 0; oc < g.out_c; ++oc) {
      std::fill(grid.begin(), grid.end(), T(0));
      for (std::size_t ic = 0; ic < g.in_c; ++ic) {
        const T* plane = padded.data() + ic * hp * wp;
        const T* w = p.weight.raw() + (oc * g.in_c + ic) * g.kh * g.kw;
        for (std::size_t ki = 0; ki < g.kh; ++ki) {
          for (std::size_t kj = 0; kj < g.kw; ++kj) {
            simd::axpy(w[ki * g.kw + kj], plane + ki * wp + kj, grid.data(),
                       span);
          }
        }
      }
      const T b = p.bias[oc];
      for (std::size_t i = 0; i < g.out_h; ++i) {
        for (std::size_t j = 0; j < g.out_w; ++j) {
          y.at(oc, i, j) = grid[i * wp + j] + b;
        }
      }
    }
    return y;
  }
  for (std::size_t oc = 0; oc < g.out_c; ++oc) {
    for (std::size_t oi = 0; oi < g.out_h; ++oi) {
      for (std::size_t oj = 0; oj < g.out_w; ++oj) {
        T acc = p.bias[oc];
        for (std::size_t ic = 0; ic < g.in_c; ++ic) {
          for (std::size_t ki = 0; ki < g.kh; ++ki) {
            const auto ii = static_cast<std::ptrdiff_t>(oi * g.stride + ki) -
                            static_cast<std::ptrdiff_t>(g.pad);
            if (ii < 0 || ii >= static_cast<std::ptrdiff_t>(g.in_h)) continue;
            for (std::size_t kj = 0; kj < g.kw; ++kj) {
              const auto jj = static_cast<std::ptrdiff_t>(oj * g.stride + kj) -
                              static_cast<std::ptrdiff_t>(g.pad);
              if (jj < 0 || jj >= static_cast<std::ptrdiff_t>(g.in_w)) continue;
              acc += p.weight[((oc * g.in_c + ic) * g.kh + ki) * g.kw + kj] *
                     x.at(ic, static_cast<std::size_t>(ii),
                          static_cast<std::size_t>(jj));
            }
          }
        }
        y.at(oc, oi, oj) = acc;
      }
    }
  }
  return y;
}

template <typename T>
BasicTensor<T> conv_backward(const BasicTensor<T>& x, const LayerParams<T>& p,
                             const ConvGeometry& g, const BasicTensor<T>& gy,
                             LayerParams<T>* pg) {
  BasicTensor<T> gx(Shape{g.in_c, g.in_h, g.in_w});
  if (pg != nullptr) {
    for (std::size_t oc = 0; oc < g.out_c; ++oc) {
      T s = 0;
      for (T v : gy.plane(oc)) s += v;
      pg->bias[oc] = s;
    }
  }
  if (g.stride == 1) {
    const std::size_t hp = g.padded_h(), wp = g.padded_w();
    const std::size_t span = (g.out_h - 1) * wp + g.out_w;
    std::vector<T> padded;
    if (pg != nullptr) padded = pad_planes(x, g);
    std::vector<T> grad_padded(g.in_c * hp * wp, T(0));
    std::vector<T> grid(g.out_h * wp);
    for (std::size_t oc = 0; oc < g.out_c; ++oc) {
      std::fill(grid.begin(), grid.end(), T(0));
      for (std::size_t i = 0; i < g.out_h; ++i) {
        for (std::size_t j = 0; j < g.out_w; ++j) grid[i * wp + j] = gy.at(oc, i, j);
      }
      for (std::size_t ic = 0; ic < g.in_c; ++ic) {
        const std::size_t wbase = (oc * g.in_c + ic) * g.kh * g.kw;
        T* gplane = grad_padded.data() + ic * hp * wp;
        for (std::size_t ki = 0; ki < g.kh; ++ki) {
          for (std::size_t kj = 0; kj < g.kw; ++kj) {
            const std::size_t off = ki * wp + kj;
            simd::axpy(p.weight[wbase + ki * g.kw + kj], grid.data(),
                       gplane + off, span);
            if (pg != nullptr) {
              pg->weight[wbase + ki * g.kw + kj] =
                  simd::dot(grid.data(), padded.data() + ic * hp * wp + off, span);
            }
          }
        }
      }
    }
    for (std::size_t c = 0; c < g.in_c; ++c) {
      for (std::size_t i = 0; i < g.in_h; ++i) {
        for (std::size_t j = 0; j < g.in_w; ++j) {
          gx.at(c, i, j) = grad_padded[(c * hp + i + g.pad) * wp + j + g.pad];
        }
      }
    }
    return gx;
  }
  for (std::size_t oc = 0; oc < g.out_c; ++oc) {
    for (std::size_t oi = 0; oi < g.out_h; ++oi) {
      for (std::size_t oj = 0; oj < g.out_w; ++oj) {
        const T go = gy.at(oc, oi, oj);
        for (std::size_t ic = 0; ic < g.in_c; ++ic) {
          for (std::size_t ki = 0; ki < g.kh; ++ki) {
            const auto ii = static_cast<std::ptrdiff_t>(oi * g.stride + ki) -
                            static_cast<std::ptrdiff_t>(g.pad);
            if (ii < 0 || ii >= static_cast<std::ptrdiff_t>(g.in_h)) continue;
            for (std::size_t kj = 0; kj < g.kw; ++kj) {
              const auto jj = static_cast<std::ptrdiff_t>(oj * g.stride + kj) -
                              static_cast<std::ptrdiff_t>(g.pad);
              if (jj < 0 || jj >= static_cast<std::ptrdiff_t>(g.in_w)) continue;
              const std::size_t widx = ((oc * g.in_c + ic) * g.kh + ki) * g.kw + kj;
              const auto si = static_cast<std::size_t>(ii);
              const auto sj = static_cast<std::size_t>(jj);
              gx.at(ic, si, sj) += p.weight[widx] * go;
              if (pg != nullptr) pg->weight[widx] += go * x.at(ic, si, sj);
            }
          }
        }
      }
    }
  }
  return gx;
}

// ---- pooling / dense -----------------------------------------------------

template <typename T>
BasicTensor<T> maxpool_forward(const BasicTensor<T>& x, const MaxPool2dSpec& spec,
                               const Shape& out_shape,
                               std::vector<std::size_t>& argmax) {
  BasicTensor<T> y(out_shape);
  argmax.assign(y.size(), 0);
  const std::size_t H = x.dim(1), W = x.dim(2);
  for (std::size_t c = 0; c < out_shape[0]; ++c) {
    for (std::size_t oi = 0; oi < out_shape[1]; ++oi) {
      for (std::size_t oj = 0; oj < out_shape[2]; ++oj) {
        std::size_t best = (c * H + oi * spec.stride) * W + oj * spec.stride;
        T best_v = x[best];
        for (std::size_t ki = 0; ki < spec.window; ++ki) {
          for (std::size_t kj = 0; kj < spec.window; ++kj) {
            const std::size_t idx =
                (c * H + oi * spec.stride + ki) * W + oj * spec.stride + kj;
            // Strict comparison keeps the first row-major maximum.
            if (x[idx] > best_v) {
              best_v = x[idx];
              best = idx;
            }
          }
        }
        const std::size_t o = (c * out_shape[1] + oi) * out_shape[2] + oj;
        y[o] = best_v;
        argmax[o] = best;
      }
    }
  }
  return y;
}

template <typename T>
BasicTensor<T> dense_forward(const BasicTensor<T>& x, const LayerParams<T>& p) {
  const std::size_t out = p.weight.dim(0), in = p.weight.dim(1);
  BasicTensor<T> y(Shape{out});
  for (std::size_t o = 0; o < out; ++o) {
    y[o] = p.bias[o] + simd::dot(p.weight.raw() + o * in, x.raw(), in);
  }
  return y;
}

template <typename T>
BasicTensor<T> dense_backward(const BasicTensor<T>& x, const LayerParams<T>& p,
                              const BasicTensor<T>& gy, LayerParams<T>* pg) {
  const std::size_t out = p.weight.dim(0), in = p.weight.dim(1);
  BasicTensor<T> gx(x.shape());
  for (std::size_t o = 0; o < out; ++o) {
    if (gy[o] == T(0)) continue;
    simd::axpy(gy[o], p.weight.raw() + o * in, gx.raw(), in);
  }
  if (pg != nullptr) {
    for (std::size_t o = 0; o < out; ++o) {
      pg->bias[o] = gy[o];
      T* row = pg->weight.raw() + o * in;
      std::fill(row, row + in, T(0));
      if (gy[o] != T(0)) simd::axpy(gy[o], x.raw(), row, in);
    }
  }
  return gx;
}

}  // namespace

Architecture reference_architecture(std::size_t num_classes, std::size_t height,
                                    std::size_t width) {
  Architecture arch;
  arch.input_shape = {3, height, width};
  arch.layers = {Conv2dSpec{16, 3, 3, 1, 1}, ReluSpec{}, MaxPool2dSpec{2, 2},
                 Conv2dSpec{32, 3, 3, 1, 1}, ReluSpec{}, MaxPool2dSpec{2, 2},
                 FlattenSpec{}, DenseSpec{num_classes}};
  return arch;
}

std::vector<Shape> infer_shapes(const Architecture& arch) {
  if (arch.input_shape.size() != 3 ||
      std::find(arch.input_shape.begin(), arch.input_shape.end(), 0) !=
          arch.input_shape.end()) {
    throw UsageError("architecture input shape must be C x H x W with all "
                     "dims >= 1, got " + shape_to_string(arch.input_shape));
  }
  if (arch.layers.empty()) throw UsageError("architecture has no layers");
  std::vector<Shape> shapes;
  Shape cur = arch.input_shape;
  for (std::size_t l = 0; l < arch.layers.size(); ++l) {
    const LayerSpec& spec = arch.layers[l];
    auto fail = [&](const std::string& why) {
      throw UsageError("layer " + std::to_string(l) + " (" + layer_name(spec) +
                       ") on input " + shape_to_string(cur) + ": " + why);
    };
    std::visit(
        Overloaded{
            [&](const Conv2dSpec& s) {
              if (cur.size() != 3) fail("expects a C x H x W input");
              if (s.out_channels == 0 || s.kernel_h == 0 || s.kernel_w == 0 ||
                  s.stride == 0) {
                fail("zero-sized channel, kernel or stride");
              }
              const std::size_t ph = cur[1] + 2 * s.padding;
              const std::size_t pw = cur[2] + 2 * s.padding;
              if (ph < s.kernel_h || pw < s.kernel_w) fail("kernel larger than input");
              cur = {s.out_channels, (ph - s.kernel_h) / s.stride + 1,
                     (pw - s.kernel_w) / s.stride + 1};
            },
            [&](const ReluSpec&) {},
            [&](const MaxPool2dSpec& s) {
              if (cur.size() != 3) fail("expects a C x H x W input");
              if (s.window == 0 || s.stride == 0) fail("zero window or stride");
              if (cur[1] < s.window || cur[2] < s.window) fail("window larger than input");
              cur = {cur[0], (cur[1] - s.window) / s.stride + 1,
                     (cur[2] - s.window) / s.stride + 1};
            },
            [&](const FlattenSpec&) { cur = {shape_size(cur)}; },
            [&](const DenseSpec& s) {
              if (s.out_features == 0) fail("zero output features");
              cur = {s.out_features};
            },
        },
        spec);
    shapes.push_back(cur);
  }
  if (shapes.back().size() != 1) {
    throw UsageError("final layer must produce a logits vector, got " +
                     shape_to_string(shapes.back()));
  }
  return shapes;
}

double glorot_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

template <typename T>
BasicClassifier<T>::BasicClassifier(Architecture arch,
                                    std::vector<LayerParams<T>> params)
    : arch_(std::move(arch)), shapes_(infer_shapes(arch_)), params_(std::move(params)) {
  if (params_.size() != arch_.layers.size()) {
    throw UsageError("classifier: expected " + std::to_string(arch_.layers.size()) +
                     " parameter slots, got " + std::to_string(params_.size()));
  }
  Shape in = arch_.input_shape;
  for (std::size_t l = 0; l < arch_.layers.size(); ++l) {
    const auto [ws, bs] = param_shapes(arch_.layers[l], in);
    if (params_[l].weight.shape() != ws || params_[l].bias.shape() != bs) {
      throw UsageError("classifier: layer " + std::to_string(l) +
                       " parameters have shapes " +
                       shape_to_string(params_[l].weight.shape()) + "/" +
                       shape_to_string(params_[l].bias.shape()) + ", expected " +
                       shape_to_string(ws) + "/" + shape_to_string(bs));
    }
    if (!params_[l].weight.all_finite() || !params_[l].bias.all_finite()) {
      throw UsageError("classifier: layer " + std::to_string(l) +
                       " has non-finite parameters");
    }
    in = shapes_[l];
  }
}

template <typename T>
BasicClassifier<T> BasicClassifier<T>::init(const Architecture& arch, Rng& rng) {
  const std::vector<Shape> shapes = infer_shapes(arch);
  std::vector<LayerParams<T>> params(arch.layers.size());
  Shape in = arch.input_shape;
  for (std::size_t l = 0; l < arch.layers.size(); ++l) {
    const auto [ws, bs] = param_shapes(arch.layers[l], in);
    if (!ws.empty()) {
      std::size_t fan_in = 0, fan_out = 0;
      if (const auto* conv = std::get_if<Conv2dSpec>(&arch.layers[l])) {
        fan_in = in[0] * conv->kernel_h * conv->kernel_w;
        fan_out = conv->out_channels * conv->kernel_h * conv->kernel_w;
      } else {
        fan_in = ws[1];
        fan_out = ws[0];
      }
      const double s = glorot_bound(fan_in, fan_out);
      params[l].weight = BasicTensor<T>(ws);
      for (T& v : params[l].weight.data()) v = static_cast<T>(rng.uniform(-s, s));
      params[l].bias = BasicTensor<T>(bs);
    }
    in = shapes[l];
  }
  return BasicClassifier(arch, std::move(params));
}

template <typename T>
std::size_t BasicClassifier<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.weight.size() + p.bias.size();
  return n;
}

template <typename T>
Logits<T> BasicClassifier<T>::forward(const BasicTensor<T>& input,
                                      ForwardContext<T>& ctx) const {
  if (input.shape() != arch_.input_shape) {
    throw UsageError("classifier forward: input shape " +
                     shape_to_string(input.shape()) + " does not match model input " +
                     shape_to_string(arch_.input_shape));
  }
  ctx.valid = false;
  ctx.inputs.resize(arch_.layers.size());
  ctx.argmax.resize(arch_.layers.size());
  BasicTensor<T> cur = input;
  Shape in_shape = arch_.input_shape;
  for (std::size_t l = 0; l < arch_.layers.size(); ++l) {
    const LayerSpec& spec = arch_.layers[l];
    BasicTensor<T> next = std::visit(
        Overloaded{
            [&](const Conv2dSpec& s) {
              return conv_forward(cur, params_[l], conv_geometry(s, in_shape, shapes_[l]));
            },
            [&](const ReluSpec&) {
              BasicTensor<T> y = cur;
              for (T& v : y.data()) v = v > T(0) ? v : T(0);
              return y;
            },
            [&](const MaxPool2dSpec& s) {
              return maxpool_forward(cur, s, shapes_[l], ctx.argmax[l]);
            },
            [&](const FlattenSpec&) { return cur.reshaped(shapes_[l]); },
            [&](const DenseSpec&) { return dense_forward(cur, params_[l]); },
        },
        spec);
    ctx.inputs[l] = std::move(cur);
    cur = std::move(next);
    in_shape = shapes_[l];
  }
  ctx.valid = true;
  return cur;
}

template <typename T>
Logits<T> BasicClassifier<T>::predict(const BasicTensor<T>& input) const {
  ForwardContext<T> ctx;
  return forward(input, ctx);
}

template <typename T>
BasicTensor<T> BasicClassifier<T>::backward_impl(
    const ForwardContext<T>& ctx, const BasicTensor<T>& grad_logits,
    std::vector<LayerParams<T>>* param_grads) const {
  if (!ctx.valid || ctx.inputs.size() != arch_.layers.size()) {
    throw UsageError("classifier backward: no retained forward context");
  }
  if (grad_logits.shape() != shapes_.back()) {
    throw UsageError("classifier backward: gradient shape " +
                     shape_to_string(grad_logits.shape()) + ", expected " +
                     shape_to_string(shapes_.back()));
  }
  if (param_grads != nullptr) {
    param_grads->assign(arch_.layers.size(), LayerParams<T>{});
    for (std::size_t l = 0; l < params_.size(); ++l) {
      if (!params_[l].weight.empty()) {
        (*param_grads)[l].weight = BasicTensor<T>(params_[l].weight.shape());
        (*param_grads)[l].bias = BasicTensor<T>(params_[l].bias.shape());
      }
    }
  }
  BasicTensor<T> g = grad_logits;
  for (std::size_t l = arch_.layers.size(); l-- > 0;) {
    const BasicTensor<T>& x = ctx.inputs[l];
    LayerParams<T>* pg = param_grads ? &(*param_grads)[l] : nullptr;
    g = std::visit(
        Overloaded{
            [&](const Conv2dSpec& s) {
              return conv_backward(x, params_[l], conv_geometry(s, x.shape(), shapes_[l]),
                                   g, pg);
            },
            [&](const ReluSpec&) {
              BasicTensor<T> gx = g;
              for (std::size_t i = 0; i < gx.size(); ++i) {
                if (!(x[i] > T(0))) gx[i] = T(0);
              }
              return gx;
            },
            [&](const MaxPool2dSpec&) {
              BasicTensor<T> gx(x.shape());
              const auto& routes = ctx.argmax[l];
              for (std::size_t o = 0; o < g.size(); ++o) gx[routes[o]] += g[o];
              return gx;
            },
            [&](const FlattenSpec&) { return g.reshaped(x.shape()); },
            [&](const DenseSpec&) { return dense_backward(x, params_[l], g, pg); },
        },
        arch_.layers[l]);
  }
  return g;
}

template <typename T>
BasicTensor<T> BasicClassifier<T>::backward_input(
    const ForwardContext<T>& ctx, const BasicTensor<T>& grad_logits) const {
  return backward_impl(ctx, grad_logits, nullptr);
}

template <typename T>
ModelGradients<T> BasicClassifier<T>::backward(
    const ForwardContext<T>& ctx, const BasicTensor<T>& grad_logits) const {
  ModelGradients<T> out;
  out.input = backward_impl(ctx, grad_logits, &out.params);
  return out;
}

template <typename T>
template <typename U>
BasicClassifier<U> BasicClassifier<T>::cast() const {
  std::vector<LayerParams<U>> params(params_.size());
  for (std::size_t l = 0; l < params_.size(); ++l) {
    if (!params_[l].weight.empty()) {
      params[l].weight = params_[l].weight.template cast<U>();
      params[l].bias = params_[l].bias.template cast<U>();
    }
  }
  return BasicClassifier<U>(arch_, std::move(params));
}

template <typename T>
std::vector<BasicTensor<T>> ClassifierOp<T>::parameter_inputs() const {
  std::vector<BasicTensor<T>> out;
  for (const auto& p : model_.params()) {
    if (p.weight.empty()) continue;
    out.push_back(p.weight);
    out.push_back(p.bias);
  }
  return out;
}

template <typename T>
typename DiffOp<T>::Tensors ClassifierOp<T>::do_forward(
    const typename DiffOp<T>::Tensors& inputs) {
  if (inputs.empty()) throw UsageError("ClassifierOp needs an image input");
  if (params_as_inputs_) {
    auto& params = model_.mutable_params();
    std::size_t k = 1;
    for (auto& p : params) {
      if (p.weight.empty()) continue;
      if (k + 1 >= inputs.size() || inputs.at(k).shape() != p.weight.shape() ||
          inputs.at(k + 1).shape() != p.bias.shape()) {
        throw UsageError("ClassifierOp: parameter inputs do not match model");
      }
      p.weight = inputs[k];
      p.bias = inputs[k + 1];
      k += 2;
    }
    if (k != inputs.size()) throw UsageError("ClassifierOp: extra inputs");
  } else if (inputs.size() != 1) {
    throw UsageError("ClassifierOp takes only the image input");
  }
  return {model_.forward(inputs[0], ctx_)};
}

template <typename T>
typename DiffOp<T>::Tensors ClassifierOp<T>::do_backward(
    const typename DiffOp<T>::Tensors& grads) {
  if (!params_as_inputs_) return {model_.backward_input(ctx_, grads.at(0))};
  ModelGradients<T> g = model_.backward(ctx_, grads.at(0));
  typename DiffOp<T>::Tensors out{std::move(g.input)};
  for (auto& p : g.params) {
    if (p.weight.empty()) continue;
    out.push_back(std::move(p.weight));
    out.push_back(std::move(p.bias));
  }
  return out;
}

template class BasicClassifier<float>;
template class BasicClassifier<double>;
template BasicClassifier<double> BasicClassifier<float>::cast<double>() const;
template BasicClassifier<float> BasicClassifier<double>::cast<float>() const;
template BasicClassifier<float> BasicClassifier<float>::cast<float>() const;
template BasicClassifier<double> BasicClassifier<double>::cast<double>() const;
template class ClassifierOp<float>;
template class ClassifierOp<double>;

}  // namespace chromaflow
