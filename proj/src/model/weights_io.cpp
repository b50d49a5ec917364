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

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "chromaflow/model.hpp"

namespace chromaflow {
namespace {

enum : std::uint8_t {
  kTagInput = 0,
  kTagConv2d = 1,
  kTagRelu = 2,
  kTagMaxPool2d = 3,
  kTagFlatten = 4,
  kTagDense = 5,
};

constexpr char kMagic[4] = {'C', 'F', 'N', '1'};

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void raw(const char* p, std::size_t n) { out_.append(p, n); }
  void dims(std::initializer_list<std::size_t> d) {
    u32(static_cast<std::uint32_t>(d.size()));
    for (std::size_t v : d) u32(static_cast<std::uint32_t>(v));
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint8_t u8(const char* field) {
    need(1, field);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }
  std::uint32_t u32(const char* field) {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_++])) << (8 * i);
    }
    return v;
  }
  float f32(const char* field) { return std::bit_cast<float>(u32(field)); }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

 private:
  void need(std::size_t n, const char* field) const {
    if (bytes_.size() - pos_ < n) {
      throw FormatError("weight file truncated while reading " + std::string(field) +
                        " at byte " + std::to_string(pos_));
    }
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

void write_tensor_payload(Writer& w, const Tensor& t) {
  for (float v : t.data()) w.f32(v);
}

Tensor read_tensor_payload(Reader& r, const Shape& shape, const char* field) {
  const std::size_t n = shape_size(shape);
  if (r.remaining() / 4 < n) {
    throw FormatError(std::string("weight file truncated in ") + field + " payload (" +
                      std::to_string(n) + " floats expected)");
  }
  std::vector<float> data(n);
  for (auto& v : data) v = r.f32(field);
  return Tensor(shape, std::move(data));
}

std::vector<std::size_t> read_dims(Reader& r, std::size_t layer, std::uint32_t expected_rank,
                                   const char* kind) {
  const std::uint32_t rank = r.u32("rank");
  if (rank != expected_rank) {
    throw FormatError("record " + std::to_string(layer) + " (" + kind + "): rank " +
                      std::to_string(rank) + ", expected " + std::to_string(expected_rank));
  }
  std::vector<std::size_t> dims(rank);
  for (auto& d : dims) {
    d = r.u32("dims");
    if (d == 0 && std::string(kind) != "conv2d") {
      throw FormatError("record " + std::to_string(layer) + " (" + kind + "): zero dimension");
    }
  }
  return dims;
}

}  // namespace

std::string serialize_weights(const Classifier& model) {
  Writer w;
  w.raw(kMagic, 4);
  const Architecture& arch = model.architecture();
  w.u32(static_cast<std::uint32_t>(arch.layers.size() + 1));
  w.u8(kTagInput);
  w.dims({arch.input_shape[0], arch.input_shape[1], arch.input_shape[2]});
  for (std::size_t l = 0; l < arch.layers.size(); ++l) {
    const LayerParams<float>& p = model.params()[l];
    const LayerSpec& spec = arch.layers[l];
    if (const auto* conv = std::get_if<Conv2dSpec>(&spec)) {
      w.u8(kTagConv2d);
      w.dims({conv->out_channels, p.weight.dim(1), conv->kernel_h, conv->kernel_w,
              conv->stride, conv->padding});
      write_tensor_payload(w, p.weight);
      write_tensor_payload(w, p.bias);
    } else if (std::holds_alternative<ReluSpec>(spec)) {
      w.u8(kTagRelu);
      w.dims({});
    } else if (const auto* pool = std::get_if<MaxPool2dSpec>(&spec)) {
      w.u8(kTagMaxPool2d);
      w.dims({pool->window, pool->stride});
    } else if (std::holds_alternative<FlattenSpec>(spec)) {
      w.u8(kTagFlatten);
      w.dims({});
    } else if (const auto* dense = std::get_if<DenseSpec>(&spec)) {
      w.u8(kTagDense);
      w.dims({dense->out_features, p.weight.dim(1)});
      write_tensor_payload(w, p.weight);
      write_tensor_payload(w, p.bias);
    }
  }
  return w.take();
}

Classifier deserialize_weights(const std::string& bytes) {
  if (bytes.size() < 4) throw FormatError("weight file truncated: missing magic");
  if (std::memcmp(bytes.data(), kMagic, 3) != 0) {
    throw FormatError("weight file has bad magic '" + bytes.substr(0, 4) +
                      "', expected 'CFN1'");
  }
  if (bytes[3] != kMagic[3]) {
    throw FormatError("weight file version '" + std::string(1, bytes[3]) +
                      "' is unsupported (magic 'CFN1' expected)");
  }
  Reader r(bytes);
  for (int i = 0; i < 4; ++i) r.u8("magic");
  const std::uint32_t count = r.u32("record count");
  if (count < 2) throw FormatError("weight file has " + std::to_string(count) +
                                   " records; need an input record and at least one layer");
  if (r.u8("tag") != kTagInput) {
    throw FormatError("record 0 must be the input shape (tag 0)");
  }
  const auto in_dims = read_dims(r, 0, 3, "input");
  Architecture arch;
  arch.input_shape = {in_dims[0], in_dims[1], in_dims[2]};

  std::vector<LayerParams<float>> params;
  for (std::uint32_t rec = 1; rec < count; ++rec) {
    const std::uint8_t tag = r.u8("tag");
    LayerParams<float> p;
    switch (tag) {
      case kTagConv2d: {
        const auto d = read_dims(r, rec, 6, "conv2d");
        for (int k = 0; k < 4; ++k) {
          if (d[k] == 0) throw FormatError("record " + std::to_string(rec) +
                                           " (conv2d): zero dimension");
        }
        if (d[4] == 0) throw FormatError("record " + std::to_string(rec) +
                                         " (conv2d): zero stride");
        arch.layers.push_back(Conv2dSpec{d[0], d[2], d[3], d[4], d[5]});
        p.weight = read_tensor_payload(r, {d[0], d[1], d[2], d[3]}, "conv2d weight");
        p.bias = read_tensor_payload(r, {d[0]}, "conv2d bias");
        break;
      }
      case kTagRelu:
        read_dims(r, rec, 0, "relu");
        arch.layers.push_back(ReluSpec{});
        break;
      case kTagMaxPool2d: {
        const auto d = read_dims(r, rec, 2, "maxpool2d");
        arch.layers.push_back(MaxPool2dSpec{d[0], d[1]});
        break;
      }
      case kTagFlatten:
        read_dims(r, rec, 0, "flatten");
        arch.layers.push_back(FlattenSpec{});
        break;
      case kTagDense: {
        const auto d = read_dims(r, rec, 2, "dense");
        arch.layers.push_back(DenseSpec{d[0]});
        p.weight = read_tensor_payload(r, {d[0], d[1]}, "dense weight");
        p.bias = read_tensor_payload(r, {d[0]}, "dense bias");
        break;
      }
      default:
        throw FormatError("record " + std::to_string(rec) + " has unknown layer tag " +
                          std::to_string(tag));
    }
    params.push_back(std::move(p));
  }
  if (r.remaining() != 0) {
    throw FormatError("weight file has " + std::to_string(r.remaining()) +
                      " trailing bytes after the last record");
  }
  try {
    return Classifier(std::move(arch), std::move(params));
  } catch (const UsageError& e) {
    throw FormatError(std::string("weight file shape mismatch: ") + e.what());
  }
}

void save_weights(const Classifier& model, const std::filesystem::path& path) {
  const std::string bytes = serialize_weights(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

Classifier load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_weights(buf.str());
}

}  // namespace chromaflow
