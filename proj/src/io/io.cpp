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

#include "chromaflow/io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace chromaflow {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

std::string lower_ext(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

// Reads one whitespace-delimited header token, skipping '#' comments.
class PpmHeader {
 public:
  explicit PpmHeader(const std::string& bytes) : bytes_(bytes) {}

  std::string token(const char* field) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) throw FormatError(std::string("PPM header truncated before ") + field);
    return bytes_.substr(start, pos_ - start);
  }

  std::size_t number(const char* field) {
    const std::string t = token(field);
    if (!std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); }) ||
        t.size() > 9) {
      throw FormatError(std::string("PPM ") + field + " '" + t + "' is not a valid integer");
    }
    return static_cast<std::size_t>(std::stoul(t));
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw FormatError("PPM header truncated before raster data");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

Image decode_png(const std::string& bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw FormatError(std::string("PNG decode failed: ") + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&image);
    throw FormatError(std::string("PNG decode failed: ") + image.message);
  }
  const std::size_t h = image.height, w = image.width;
  if (h == 0 || w == 0) throw FormatError("PNG has zero dimension");
  Image img(h, w, ColorSpace::kRgb);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      for (std::size_t c = 0; c < 3; ++c) {
        img.at(c, i, j) = static_cast<float>(buffer[(i * w + j) * 3 + c]) / 255.0f;
      }
    }
  }
  return img;
}

std::vector<png_byte> interleave(const Image& img) {
  const std::size_t h = img.height(), w = img.width();
  std::vector<png_byte> buffer(h * w * 3);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      for (std::size_t c = 0; c < 3; ++c) buffer[(i * w + j) * 3 + c] = quantize(img.at(c, i, j));
    }
  }
  return buffer;
}

void write_png(const Image& img, const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  const std::vector<png_byte> buffer = interleave(img);
  if (!png_image_write_to_file(&image, path.c_str(), 0, buffer.data(), 0, nullptr)) {
    throw IoError("failed writing PNG " + path.string() + ": " + image.message);
  }
}

void require_rgb(const Image& img, const char* op) {
  if (img.space != ColorSpace::kRgb) throw UsageError(std::string(op) + ": image must be RGB");
}

}  // namespace

std::uint8_t quantize(float v) {
  const double clamped = std::clamp(static_cast<double>(v), 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(clamped * 255.0 + 0.5));
}

ImageFormat format_from_extension(const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".ppm") return ImageFormat::kPpm;
  if (ext == ".png") return ImageFormat::kPng;
  throw UsageError("cannot infer image format from '" + path.string() +
                   "' (use .ppm or .png)");
}

std::string encode_ppm(const Image& img) {
  require_rgb(img, "encode_ppm");
  const std::size_t h = img.height(), w = img.width();
  std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  const std::vector<png_byte> buffer = interleave(img);
  out.append(reinterpret_cast<const char*>(buffer.data()), buffer.size());
  return out;
}

Image decode_ppm(const std::string& bytes) {
  PpmHeader header(bytes);
  const std::string magic = header.token("magic");
  if (magic != "P6") throw FormatError("unknown image format (magic '" + magic + "')");
  const std::size_t w = header.number("width");
  const std::size_t h = header.number("height");
  const std::size_t maxval = header.number("maxval");
  if (w == 0 || h == 0) throw FormatError("PPM has zero dimension");
  if (maxval != 255) {
    throw FormatError("PPM maxval " + std::to_string(maxval) + " unsupported (only 255)");
  }
  const std::size_t offset = header.raster_offset();
  const std::size_t need = w * h * 3;
  if (bytes.size() < offset || bytes.size() - offset < need) {
    throw FormatError("PPM raster truncated: expected " + std::to_string(need) + " bytes, got " +
                      std::to_string(bytes.size() >= offset ? bytes.size() - offset : 0));
  }
  Image img(h, w, ColorSpace::kRgb);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      for (std::size_t c = 0; c < 3; ++c) {
        img.at(c, i, j) = static_cast<float>(p[(i * w + j) * 3 + c]) / 255.0f;
      }
    }
  }
  return img;
}

Image read_image(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') return decode_ppm(bytes);
  if (bytes.size() >= 8 && static_cast<unsigned char>(bytes[0]) == 0x89 && bytes[1] == 'P' &&
      bytes[2] == 'N' && bytes[3] == 'G') {
    return decode_png(bytes);
  }
  try {
    return decode_ppm(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_image(const Image& img, const std::filesystem::path& path, ImageFormat format) {
  require_rgb(img, "write_image");
  if (format == ImageFormat::kPng) {
    write_png(img, path);
  } else {
    write_file(path, encode_ppm(img));
  }
}

void write_image(const Image& img, const std::filesystem::path& path) {
  write_image(img, path, format_from_extension(path));
}

Image chroma_subsample_420(const Image& img, ColorSpace space) {
  require_rgb(img, "chroma_subsample_420");
  if (space == ColorSpace::kRgb) {
    throw UsageError("chroma_subsample_420: space must be YCbCr or Lab");
  }
  Image color = convert(img, space);
  const std::size_t H = color.height(), W = color.width();
  for (std::size_t c = 1; c < 3; ++c) {
    for (std::size_t bi = 0; bi < H; bi += 2) {
      for (std::size_t bj = 0; bj < W; bj += 2) {
        const std::size_t ei = std::min(bi + 2, H), ej = std::min(bj + 2, W);
        double sum = 0.0;
        for (std::size_t i = bi; i < ei; ++i) {
          for (std::size_t j = bj; j < ej; ++j) sum += color.at(c, i, j);
        }
        const auto mean = static_cast<float>(sum / static_cast<double>((ei - bi) * (ej - bj)));
        for (std::size_t i = bi; i < ei; ++i) {
          for (std::size_t j = bj; j < ej; ++j) color.at(c, i, j) = mean;
        }
      }
    }
  }
  return clip_to_gamut(convert(color, ColorSpace::kRgb));
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = lower_ext(entry.path());
    if (ext == ".ppm" || ext == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<LabeledImage> read_labeled_directory(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root)) throw IoError(root.string() + " is not a directory");
  std::vector<std::pair<std::size_t, std::filesystem::path>> classes;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (name.empty() || name.size() > 6 ||
        !std::all_of(name.begin(), name.end(), [](unsigned char c) { return std::isdigit(c); })) {
      continue;
    }
    classes.emplace_back(std::stoul(name), entry.path());
  }
  std::sort(classes.begin(), classes.end());
  std::vector<LabeledImage> data;
  for (const auto& [label, dir] : classes) {
    for (const auto& file : list_images(dir)) data.push_back({read_image(file), label});
  }
  return data;
}

}  // namespace chromaflow
