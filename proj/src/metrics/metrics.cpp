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

#include "chromaflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace chromaflow {
namespace {

struct Plane {
  std::size_t h = 0, w = 0;
  std::vector<double> v;
  double& at(std::size_t i, std::size_t j) { return v[i * w + j]; }
  double at(std::size_t i, std::size_t j) const { return v[i * w + j]; }
};

std::vector<Plane> planes_of(const Image& img, SsimDomain domain) {
  const std::size_t h = img.height(), w = img.width(), n = h * w;
  std::vector<Plane> out;
  if (domain == SsimDomain::kLuma) {
    Plane p{h, w, std::vector<double>(n)};
    const auto d = img.pixels.data();
    for (std::size_t i = 0; i < n; ++i) {
      p.v[i] = 0.299 * d[i] + 0.587 * d[n + i] + 0.114 * d[2 * n + i];
    }
    out.push_back(std::move(p));
    return out;
  }
  for (std::size_t c = 0; c < 3; ++c) {
    const auto src = img.pixels.plane(c);
    out.push_back(Plane{h, w, std::vector<double>(src.begin(), src.end())});
  }
  return out;
}

const std::vector<double>& gaussian_taps() {
  static const std::vector<double> taps = [] {
    std::vector<double> g(kSsimWindow);
    const double center = static_cast<double>(kSsimWindow / 2);
    double sum = 0.0;
    for (std::size_t k = 0; k < kSsimWindow; ++k) {
      const double d = static_cast<double>(k) - center;
      g[k] = std::exp(-(d * d) / (2.0 * kSsimSigma * kSsimSigma));
      sum += g[k];
    }
    for (double& x : g) x /= sum;
    return g;
  }();
  return taps;
}

// Separable valid-region filtering with the Gaussian window.
Plane filter_valid(const Plane& p) {
  const auto& g = gaussian_taps();
  const std::size_t K = g.size();
  const std::size_t ow = p.w - K + 1, oh = p.h - K + 1;
  Plane tmp{p.h, ow, std::vector<double>(p.h * ow)};
  for (std::size_t i = 0; i < p.h; ++i) {
    for (std::size_t j = 0; j < ow; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < K; ++k) acc += g[k] * p.at(i, j + k);
      tmp.at(i, j) = acc;
    }
  }
  Plane out{oh, ow, std::vector<double>(oh * ow)};
  for (std::size_t i = 0; i < oh; ++i) {
    for (std::size_t j = 0; j < ow; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < K; ++k) acc += g[k] * tmp.at(i + k, j);
      out.at(i, j) = acc;
    }
  }
  return out;
}

Plane product(const Plane& a, const Plane& b) {
  Plane out{a.h, a.w, std::vector<double>(a.v.size())};
  for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

struct SsimTerms {
  double ssim;  // mean of l * cs
  double cs;    // mean of cs
};

// The luminance and contrast-structure maps are evaluated with the same
// operation order for both inputs, so identical inputs score exactly 1.
SsimTerms ssim_terms(const Plane& a, const Plane& b) {
  constexpr double c1 = (kSsimK1 * 1.0) * (kSsimK1 * 1.0);
  constexpr double c2 = (kSsimK2 * 1.0) * (kSsimK2 * 1.0);
  const Plane mu_a = filter_valid(a);
  const Plane mu_b = filter_valid(b);
  const Plane e_aa = filter_valid(product(a, a));
  const Plane e_bb = filter_valid(product(b, b));
  const Plane e_ab = filter_valid(product(a, b));
  double ssim_sum = 0.0, cs_sum = 0.0;
  for (std::size_t i = 0; i < mu_a.v.size(); ++i) {
    const double ma = mu_a.v[i], mb = mu_b.v[i];
    const double var_a = e_aa.v[i] - ma * ma;
    const double var_b = e_bb.v[i] - mb * mb;
    const double cov = e_ab.v[i] - ma * mb;
    const double l = (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
    const double cs = (2.0 * cov + c2) / (var_a + var_b + c2);
    ssim_sum += l * cs;
    cs_sum += cs;
  }
  const auto n = static_cast<double>(mu_a.v.size());
  return {ssim_sum / n, cs_sum / n};
}

Plane downsample2(const Plane& p) {
  const std::size_t oh = p.h / 2, ow = p.w / 2;
  Plane out{oh, ow, std::vector<double>(oh * ow)};
  for (std::size_t i = 0; i < oh; ++i) {
    for (std::size_t j = 0; j < ow; ++j) {
      out.at(i, j) = 0.25 * (p.at(2 * i, 2 * j) + p.at(2 * i, 2 * j + 1) +
                             p.at(2 * i + 1, 2 * j) + p.at(2 * i + 1, 2 * j + 1));
    }
  }
  return out;
}

void check_pair(const Image& a, const Image& b, const char* op) {
  if (a.space != ColorSpace::kRgb || b.space != ColorSpace::kRgb) {
    throw UsageError(std::string(op) + ": inputs must be RGB");
  }
  if (a.height() != b.height() || a.width() != b.width()) {
    throw UsageError(std::string(op) + ": dimension mismatch " +
                     std::to_string(a.height()) + "x" + std::to_string(a.width()) +
                     " vs " + std::to_string(b.height()) + "x" +
                     std::to_string(b.width()));
  }
}

}  // namespace

double ssim(const Image& a, const Image& b, const SsimOptions& options) {
  check_pair(a, b, "ssim");
  if (a.height() < kSsimWindow || a.width() < kSsimWindow) {
    throw UsageError("ssim: image " + std::to_string(a.height()) + "x" +
                     std::to_string(a.width()) + " is smaller than the " +
                     std::to_string(kSsimWindow) + "x" + std::to_string(kSsimWindow) +
                     " window");
  }
  const auto pa = planes_of(a, options.domain);
  const auto pb = planes_of(b, options.domain);
  double sum = 0.0;
  for (std::size_t c = 0; c < pa.size(); ++c) sum += ssim_terms(pa[c], pb[c]).ssim;
  return sum / static_cast<double>(pa.size());
}

std::size_t max_ms_ssim_scales(std::size_t height, std::size_t width) {
  std::size_t side = std::min(height, width);
  std::size_t scales = 0;
  while (scales < 5 && side >= kSsimWindow) {
    ++scales;
    side /= 2;
  }
  return scales;
}

double ms_ssim(const Image& a, const Image& b, const MsSsimOptions& options) {
  check_pair(a, b, "ms_ssim");
  const std::size_t feasible = max_ms_ssim_scales(a.height(), a.width());
  if (feasible == 0) {
    throw UsageError("ms_ssim: image smaller than the " + std::to_string(kSsimWindow) +
                     "x" + std::to_string(kSsimWindow) + " window");
  }
  const std::size_t scales = options.scales == 0 ? feasible : options.scales;
  if (scales > feasible || scales > 5) {
    throw UsageError("ms_ssim: " + std::to_string(scales) + " scales requested but a " +
                     std::to_string(a.height()) + "x" + std::to_string(a.width()) +
                     " image supports at most " + std::to_string(feasible));
  }
  double weight_sum = 0.0;
  for (std::size_t s = 0; s < scales; ++s) weight_sum += kMsSsimWeights[s];

  auto pa = planes_of(a, options.domain);
  auto pb = planes_of(b, options.domain);
  double total = 0.0;
  for (std::size_t c = 0; c < pa.size(); ++c) {
    Plane xa = pa[c], xb = pb[c];
    double value = 1.0;
    for (std::size_t s = 0; s < scales; ++s) {
      const double w = scales == 1 ? 1.0 : kMsSsimWeights[s] / weight_sum;
      const SsimTerms t = ssim_terms(xa, xb);
      const bool last = s + 1 == scales;
      double term = last ? t.ssim : t.cs;
      // Fractional powers need a nonnegative base.
      if (scales > 1) term = std::max(term, 0.0);
      value *= std::pow(term, w);
      if (!last) {
        xa = downsample2(xa);
        xb = downsample2(xb);
      }
    }
    total += value;
  }
  return total / static_cast<double>(pa.size());
}

double colorfulness(const Image& img) {
  if (img.space != ColorSpace::kRgb) throw UsageError("colorfulness: input must be RGB");
  const std::size_t n = img.height() * img.width();
  const auto r = img.pixels.plane(0), g = img.pixels.plane(1), b = img.pixels.plane(2);
  double sum_rg = 0, sum_yb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sum_rg += static_cast<double>(r[i]) - g[i];
    sum_yb += 0.5 * (static_cast<double>(r[i]) + g[i]) - b[i];
  }
  const double mean_rg = sum_rg / static_cast<double>(n);
  const double mean_yb = sum_yb / static_cast<double>(n);
  double var_rg = 0, var_yb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rg = static_cast<double>(r[i]) - g[i] - mean_rg;
    const double yb = 0.5 * (static_cast<double>(r[i]) + g[i]) - b[i] - mean_yb;
    var_rg += rg * rg;
    var_yb += yb * yb;
  }
  var_rg /= static_cast<double>(n);
  var_yb /= static_cast<double>(n);
  return std::sqrt(var_rg + var_yb) + 0.3 * std::sqrt(mean_rg * mean_rg + mean_yb * mean_yb);
}

LpNorms lp_norms(const Image& a, const Image& b) {
  if (a.pixels.shape() != b.pixels.shape()) {
    throw UsageError("lp_norms: dimension mismatch " + shape_to_string(a.pixels.shape()) +
                     " vs " + shape_to_string(b.pixels.shape()));
  }
  const std::size_t n = a.height() * a.width();
  LpNorms out;
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    bool changed = false;
    for (std::size_t c = 0; c < 3; ++c) {
      const double d = std::abs(static_cast<double>(a.pixels[c * n + i]) - b.pixels[c * n + i]);
      sq += d * d;
      out.linf = std::max(out.linf, d);
      if (d > 1e-6) changed = true;
    }
    if (changed) ++out.l0;
  }
  out.l2 = std::sqrt(sq);
  return out;
}

MetricReport measure(const Image& benign, const Image& test, const SsimOptions& options) {
  MetricReport r;
  r.ssim = ssim(benign, test, options);
  r.ms_ssim = ms_ssim(benign, test, MsSsimOptions{0, options.domain});
  r.one_minus_ssim = 1.0 - r.ssim;
  r.one_minus_ms_ssim = 1.0 - r.ms_ssim;
  const LpNorms norms = lp_norms(benign, test);
  r.l0 = norms.l0;
  r.l2 = norms.l2;
  r.linf = norms.linf;
  r.colorfulness_benign = colorfulness(benign);
  return r;
}

ExternalMetrics load_external_metrics(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw IoError("cannot open " + csv.string());
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw FormatError(csv.string() + ": missing header");
  const auto header = split(line);
  if (header.empty() || header[0] != "image_path") {
    throw FormatError(csv.string() + ": first column must be image_path");
  }
  ExternalMetrics out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw FormatError(csv.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " columns");
    }
    auto& row = out[cells[0]];
    for (std::size_t k = 1; k < cells.size(); ++k) {
      try {
        row[header[k]] = std::stod(cells[k]);
      } catch (const std::exception&) {
        throw FormatError(csv.string() + ":" + std::to_string(line_no) +
                          ": non-numeric value '" + cells[k] + "'");
      }
    }
  }
  return out;
}

}  // namespace chromaflow
