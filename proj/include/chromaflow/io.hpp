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

#ifndef CHROMAFLOW_IO_HPP_
#define CHROMAFLOW_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "chromaflow/colorspace.hpp"
#include "chromaflow/train.hpp"

namespace chromaflow {

enum class ImageFormat { kPpm, kPng };

// By extension: .ppm -> PPM, .png -> PNG. Anything else is a UsageError.
ImageFormat format_from_extension(const std::filesystem::path& path);

// Binary PPM (P6, maxval 255) or 8-bit PNG (gray/RGB; alpha is dropped).
// Values are mapped to [0, 1] by v / 255. Detection is by file signature.
Image read_image(const std::filesystem::path& path);

// Quantizes with round-half-up, floor(v * 255 + 0.5), after clamping to
// [0, 1].
void write_image(const Image& img, const std::filesystem::path& path,
                 ImageFormat format);
void write_image(const Image& img, const std::filesystem::path& path);

// In-memory PPM codec ("P6\n<w> <h>\n255\n" + RGB triples).
std::string encode_ppm(const Image& img);
Image decode_ppm(const std::string& bytes);

std::uint8_t quantize(float v);

// 4:2:0 chroma subsampling in `space` (YCbCr or Lab): every 2x2 block of
// each chroma plane is replaced by its mean (partial blocks at odd edges
// average what they contain), luma is kept, and the result is converted back
// and clipped.
Image chroma_subsample_420(const Image& img, ColorSpace space);

// Directory layout <class_index>/<name>.ppm (or .png), sorted by class then
// file name.
std::vector<LabeledImage> read_labeled_directory(const std::filesystem::path& root);

// All .ppm/.png files directly under `dir`, sorted by name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

}  // namespace chromaflow

#endif  // CHROMAFLOW_IO_HPP_
